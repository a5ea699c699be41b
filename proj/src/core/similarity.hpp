// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "core/types.hpp"

namespace wm {

/// Pearson correlation coefficient of two equal-length series, computed
/// two-pass (means, then moments) in double precision. The result is
/// clamped to [-1, 1] after rounding.
///
/// This is the calibration-side measure only; it never runs in the
/// real-time path. Constant input raises undefined_correlation instead of
/// returning NaN.
double pearson_correlation(std::span<const sample_t> t, std::span<const sample_t> c);

/// Sum of absolute sample-wise differences. The 64-bit accumulator covers
/// any trace length representable here (|diff| < 2^16, so overflow would
/// need 2^48 samples).
std::uint64_t sad(std::span<const sample_t> t, std::span<const sample_t> c);

/// 1 iff lower <= sample <= upper, inclusive on both ends.
constexpr bool interval_indicator(sample_t sample, sample_t upper, sample_t lower) {
    return sample <= upper && sample >= lower;
}

/// Counts the compared positions of `it` whose corresponding segment sample
/// lies inside the corridor. For stride s the compared samples are
/// segment[0], segment[s], segment[2s], ...; the segment must cover the
/// full window span (m-1)*s + 1.
std::uint32_t interval_score(std::span<const sample_t> segment, const IntervalTemplate &it);

} // namespace wm
