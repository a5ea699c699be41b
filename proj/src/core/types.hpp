// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace wm {

/// ADC sample. Stored in a 16-bit signed container regardless of the
/// configured precision p <= 16; p is enforced by range checks at ingestion,
/// not by bit-packing.
using sample_t = std::int16_t;

inline constexpr std::uint32_t kDefaultPrecision = 14;
inline constexpr std::uint32_t kMaxPrecision = 16;

void validate_precision(std::uint32_t precision_p);

constexpr std::int32_t sample_min(std::uint32_t precision_p) {
    return -(std::int32_t(1) << (precision_p - 1));
}

constexpr std::int32_t sample_max(std::uint32_t precision_p) {
    return (std::int32_t(1) << (precision_p - 1)) - 1;
}

constexpr bool sample_in_range(std::int64_t value, std::uint32_t precision_p) {
    return value >= sample_min(precision_p) && value <= sample_max(precision_p);
}

/// Saturates to the representable range of p-bit samples, mirroring
/// fixed-width hardware registers.
constexpr sample_t clamp_sample(std::int64_t value, std::uint32_t precision_p) {
    const std::int64_t lo = sample_min(precision_p);
    const std::int64_t hi = sample_max(precision_p);
    if (value < lo)
        return static_cast<sample_t>(lo);
    if (value > hi)
        return static_cast<sample_t>(hi);
    return static_cast<sample_t>(value);
}

/// A finite sequence of signed integer samples with sampling-rate metadata.
/// The sample rate is metadata only; no computation depends on it.
struct Trace {
    std::vector<sample_t> samples;
    double sample_rate_hz = 1.0;
    std::string label;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

void validate_trace(const Trace &trace, std::uint32_t precision_p = kDefaultPrecision);

/// Reference waveform of n samples. `stride` is the comparison subsampling
/// factor: only every stride-th sample takes part in matching, anchored at
/// sample 0. `positional_buffer` counts pre-template samples of the
/// operation that must be retained by the buffering stage.
struct Template {
    std::vector<sample_t> samples;
    std::uint32_t stride = 1;
    std::uint32_t positional_buffer = 0;

    std::size_t length() const noexcept { return samples.size(); }

    /// Number of compared positions m = ceil(n / stride).
    std::size_t compared_positions() const noexcept {
        if (samples.empty())
            return 0;
        return (samples.size() + stride - 1) / stride;
    }

    /// Extent of the compared window in stream samples: (m-1)*stride + 1.
    std::size_t window_span() const noexcept {
        const std::size_t m = compared_positions();
        return m == 0 ? 0 : (m - 1) * std::size_t(stride) + 1;
    }
};

void validate_template(const Template &tpl, std::uint32_t precision_p = kDefaultPrecision);

/// Per-position comparison corridor, precomputed from a Template and a
/// symmetric offset. upper[i]/lower[i] bound the stride-decimated template
/// sample i; `threshold` is the minimum number of in-corridor positions for
/// a match.
struct IntervalTemplate {
    std::vector<sample_t> upper;
    std::vector<sample_t> lower;
    std::uint32_t threshold = 0;
    std::uint32_t source_stride = 1;
    /// Full-rate length n of the template this corridor was derived from
    /// (the buffering stage is sized from n, not from the compared count).
    std::uint64_t source_length = 0;

    std::size_t size() const noexcept { return upper.size(); }

    std::size_t window_span() const noexcept {
        return upper.empty() ? 0 : (upper.size() - 1) * std::size_t(source_stride) + 1;
    }

    void set_threshold(std::uint32_t value);
};

void validate_interval_template(const IntervalTemplate &it);

/// Precomputes the corridor bounds upper[i] = clamp(c_i + offset),
/// lower[i] = clamp(c_i - offset) for every compared position of the
/// template. The threshold is initialized to m; callers recalibrate later.
IntervalTemplate make_interval_template(const Template &tpl, std::uint32_t offset,
                                        std::uint32_t precision_p = kDefaultPrecision);

} // namespace wm
