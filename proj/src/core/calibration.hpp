// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace wm {

/// Start indices of operations found in a recording, plus the candidates
/// that looked like operations but fell below the correlation threshold.
struct LocatedOperations {
    std::vector<std::uint64_t> locations; ///< strictly increasing, >= span apart
    std::uint64_t span = 0;               ///< samples per operation

    struct Rejected {
        std::uint64_t index;
        std::string reason;
    };
    std::vector<Rejected> rejected;
};

struct LocatorParams {
    /// Minimum normalized correlation for an accepted operation.
    double correlation_threshold = 0.8;
    /// Step of the coarse scan; refinement always runs at step 1 around
    /// coarse candidates.
    std::uint32_t coarse_step = 4;
    /// Candidates in expected slots correlating below the threshold but at
    /// or above this floor are reported as rejected (deformed operations);
    /// below the floor they are treated as background.
    double reject_floor = 0.3;
    /// Optional hint: how many operations the recording should contain.
    /// Bounds the extrapolation beyond the first/last accepted location.
    std::optional<std::uint64_t> expected_count;
};

/// Finds every segment of the recording whose Pearson correlation with the
/// seed segment reaches the threshold: coarse scan, step-1 refinement
/// around coarse candidates, then non-maximum suppression within one span.
/// Deterministic; no RNG anywhere.
LocatedOperations locate_operations(const Trace &recording, const Trace &seed_segment,
                                    const LocatorParams &params = {});

/// Averages the located windows sample-by-sample into a template of
/// length_n samples, rounding half away from zero.
Template build_template(const Trace &recording, const LocatedOperations &ops,
                        std::uint64_t length_n, std::uint32_t positional_buffer = 0);

struct CalibrationReport {
    std::uint32_t chosen_offset = 0;
    std::uint32_t chosen_threshold = 0;
    std::int64_t true_score_min = 0;
    std::int64_t background_score_max = 0;
    std::int64_t margin = 0;
};

struct CalibrationOptions {
    /// Background windows are taken every background_step starts inside
    /// regions at least one span away from every located operation.
    std::uint32_t background_step = 17;
    std::uint32_t precision = kDefaultPrecision;
};

class CalibrationError : public Error {
  public:
    CalibrationError(std::string message, CalibrationReport best)
        : Error(ErrorKind::calibration_failed, std::move(message)), bestReport(best) {}

    const CalibrationReport &best() const noexcept { return bestReport; }

  private:
    CalibrationReport bestReport;
};

/// Sweeps corridor offsets over [offset_min, offset_max], scoring the known
/// operation windows (true set) against windows from operation-free regions
/// (background set), and picks the offset with the largest margin between
/// the weakest true score and the strongest background score. The returned
/// threshold is the midpoint of the two, rounded up.
///
/// Throws CalibrationError (carrying the best report) when no offset
/// separates the sets.
std::pair<IntervalTemplate, CalibrationReport>
calibrate(const Trace &recording, const LocatedOperations &ops, const Template &tpl,
          std::uint32_t offset_min, std::uint32_t offset_max, const CalibrationOptions &opts = {});

/// Marks the template for strided comparison: every stride-th sample takes
/// part in matching while the sample data stays at full rate.
Template subsample_template(const Template &tpl, std::uint32_t stride);

} // namespace wm
