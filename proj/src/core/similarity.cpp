// SPDX-License-Identifier: Apache-2.0
#include "core/similarity.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace wm {

double pearson_correlation(std::span<const sample_t> t, std::span<const sample_t> c) {
    if (t.size() != c.size())
        raise(ErrorKind::invalid_argument,
              "correlation needs equal lengths, got " + std::to_string(t.size()) + " vs " +
                  std::to_string(c.size()));
    const std::size_t n = t.size();
    if (n < 2)
        raise(ErrorKind::invalid_argument, "correlation needs at least 2 samples");

    double mean_t = 0.0, mean_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_t += t[i];
        mean_c += c[i];
    }
    mean_t /= double(n);
    mean_c /= double(n);

    double cov = 0.0, var_t = 0.0, var_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t[i] - mean_t;
        const double dc = c[i] - mean_c;
        cov += dt * dc;
        var_t += dt * dt;
        var_c += dc * dc;
    }
    if (var_t == 0.0 || var_c == 0.0)
        raise(ErrorKind::undefined_correlation,
              "correlation undefined for constant input (zero variance)");

    const double r = cov / (std::sqrt(var_t) * std::sqrt(var_c));
    if (r > 1.0)
        return 1.0;
    if (r < -1.0)
        return -1.0;
    return r;
}

std::uint64_t sad(std::span<const sample_t> t, std::span<const sample_t> c) {
    if (t.size() != c.size())
        raise(ErrorKind::invalid_argument,
              "SAD needs equal lengths, got " + std::to_string(t.size()) + " vs " +
                  std::to_string(c.size()));
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        sum += std::uint64_t(std::abs(std::int32_t(t[i]) - std::int32_t(c[i])));
    return sum;
}

std::uint32_t interval_score(std::span<const sample_t> segment, const IntervalTemplate &it) {
    const std::size_t m = it.size();
    if (m == 0)
        raise(ErrorKind::invalid_argument, "interval template is empty");
    const std::size_t span = it.window_span();
    if (segment.size() < span)
        raise(ErrorKind::invalid_argument,
              "segment of " + std::to_string(segment.size()) +
                  " samples shorter than window span " + std::to_string(span));

    std::uint32_t score = 0;
    const std::size_t s = it.source_stride;
    for (std::size_t i = 0; i < m; ++i)
        score += interval_indicator(segment[i * s], it.upper[i], it.lower[i]) ? 1u : 0u;
    return score;
}

} // namespace wm
