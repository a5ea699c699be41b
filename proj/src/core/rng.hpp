// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wm::rng {

// Counter-based generator: every value is a pure function of
// (seed, stream, index), so traces are reproducible independent of
// generation order or partitioning.

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = mix64(seed + kGolden * (stream + 1));
    return mix64(z + kGolden * (index + 1));
}

/// Uniform in [0, 1); 53-bit resolution.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return double(at(seed, stream, index) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [-amplitude, +amplitude]. Modulo bias is negligible
/// for any amplitude this library deals in (< 2^20).
inline std::int64_t uniform_int(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                                std::int64_t amplitude) {
    if (amplitude <= 0)
        return 0;
    const std::uint64_t width = std::uint64_t(2 * amplitude + 1);
    return std::int64_t(at(seed, stream, index) % width) - amplitude;
}

/// Standard normal via Box-Muller on two counter values.
inline double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const double u1 = (double(at(seed, stream, 2 * index) >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform01(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace wm::rng
