// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace wm {

/// Noise model for the background and per-embedding jitter.
struct NoiseSpec {
    enum class Kind { none, uniform, gaussian };
    Kind kind = Kind::none;
    /// Uniform: samples in [-amplitude, amplitude]. Gaussian: standard
    /// deviation in ADC codes, rounded after draw.
    std::int32_t amplitude = 0;
};

/// One pattern occurrence to place into the synthetic stream.
struct Embedding {
    std::string pattern_id;
    std::uint64_t position = 0;
    std::int64_t scale_num = 1;
    std::int64_t scale_den = 1;
    std::int32_t vertical_offset = 0;
    std::int32_t noise_amplitude = 0;
    /// First deform_prefix samples are replaced with pattern-free noise;
    /// nonzero marks the embedding as not well-formed.
    std::uint64_t deform_prefix = 0;
};

struct SynthSpec {
    std::uint64_t length = 0;
    std::uint64_t seed = 0;
    std::uint32_t precision = kDefaultPrecision;
    double sample_rate_hz = 1.0e10;
    NoiseSpec background;
    std::vector<Embedding> embeddings;
};

/// Desk-scale cap on synthetic trace length.
inline constexpr std::uint64_t kMaxSynthLength = 10'000'000;

struct GroundTruthEntry {
    std::uint64_t position = 0;
    std::string pattern_id;
    bool well_formed = true;
};

/// Renders the spec into a trace: background noise with each embedding's
/// pattern scaled, vertically shifted, noised, and prefix-deformed in
/// place. Embeddings replace the background over their extent. Returns the
/// trace and the ground truth listing every embedding in position order.
std::pair<Trace, std::vector<GroundTruthEntry>>
generate(const SynthSpec &spec, const std::map<std::string, Template> &patterns);

/// Deterministic band-limited test pattern: a sum of `components` sinusoids
/// with pseudo-random periods in [min_period, max_period], phases, and
/// weights, peak-normalized to `amplitude`.
Template make_smooth_pattern(std::uint64_t seed, std::size_t length, std::int32_t amplitude,
                             std::uint32_t components = 8, std::uint32_t min_period = 16,
                             std::uint32_t max_period = 256);

} // namespace wm
