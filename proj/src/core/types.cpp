// SPDX-License-Identifier: Apache-2.0
#include "core/types.hpp"

#include <string>

namespace wm {

void validate_precision(std::uint32_t precision_p) {
    if (precision_p < 1 || precision_p > kMaxPrecision)
        raise(ErrorKind::invalid_argument,
              "precision must be in [1, 16] bits, got " + std::to_string(precision_p));
}

void validate_trace(const Trace &trace, std::uint32_t precision_p) {
    validate_precision(precision_p);
    if (trace.sample_rate_hz <= 0.0)
        raise(ErrorKind::invalid_argument, "sample rate must be positive");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (!sample_in_range(trace.samples[i], precision_p))
            raise(ErrorKind::range, "sample " + std::to_string(i) + " = " +
                                        std::to_string(trace.samples[i]) +
                                        " outside " + std::to_string(precision_p) +
                                        "-bit range");
    }
}

void validate_template(const Template &tpl, std::uint32_t precision_p) {
    validate_precision(precision_p);
    if (tpl.samples.empty())
        raise(ErrorKind::invalid_argument, "template must contain at least one sample");
    if (tpl.stride < 1)
        raise(ErrorKind::invalid_argument, "template stride must be >= 1");
    for (std::size_t i = 0; i < tpl.samples.size(); ++i) {
        if (!sample_in_range(tpl.samples[i], precision_p))
            raise(ErrorKind::range, "template sample " + std::to_string(i) +
                                        " outside " + std::to_string(precision_p) +
                                        "-bit range");
    }
}

void IntervalTemplate::set_threshold(std::uint32_t value) {
    if (value > upper.size())
        raise(ErrorKind::invalid_argument,
              "threshold " + std::to_string(value) + " exceeds compared position count " +
                  std::to_string(upper.size()));
    threshold = value;
}

void validate_interval_template(const IntervalTemplate &it) {
    if (it.upper.empty() || it.upper.size() != it.lower.size())
        raise(ErrorKind::invalid_argument,
              "interval template bounds must be non-empty and of equal length");
    if (it.source_stride < 1)
        raise(ErrorKind::invalid_argument, "interval template stride must be >= 1");
    for (std::size_t i = 0; i < it.upper.size(); ++i) {
        if (it.upper[i] < it.lower[i])
            raise(ErrorKind::invalid_argument,
                  "upper bound below lower bound at position " + std::to_string(i));
    }
    if (it.threshold > it.upper.size())
        raise(ErrorKind::invalid_argument, "threshold exceeds compared position count");
    if (it.source_length != 0) {
        const std::uint64_t span = it.window_span();
        if (it.source_length < span || it.source_length > it.size() * std::uint64_t(it.source_stride))
            raise(ErrorKind::invalid_argument,
                  "source length inconsistent with bounds and stride");
    }
}

IntervalTemplate make_interval_template(const Template &tpl, std::uint32_t offset,
                                        std::uint32_t precision_p) {
    validate_template(tpl, precision_p);

    IntervalTemplate it;
    it.source_stride = tpl.stride;
    it.source_length = tpl.samples.size();
    const std::size_t m = tpl.compared_positions();
    it.upper.reserve(m);
    it.lower.reserve(m);
    for (std::size_t i = 0; i < tpl.samples.size(); i += tpl.stride) {
        const std::int64_t c = tpl.samples[i];
        it.upper.push_back(clamp_sample(c + std::int64_t(offset), precision_p));
        it.lower.push_back(clamp_sample(c - std::int64_t(offset), precision_p));
    }
    it.threshold = static_cast<std::uint32_t>(m);
    return it;
}

} // namespace wm
