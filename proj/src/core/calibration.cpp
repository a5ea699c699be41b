// SPDX-License-Identifier: Apache-2.0
#include "core/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "core/similarity.hpp"

namespace wm {

namespace {

/// Sliding normalized cross-correlation with O(1) window moments via prefix
/// sums; only the cross term costs O(span) per window.
class NccScanner {
  public:
    NccScanner(const Trace &recording, const Trace &seed)
        : rec(recording.samples), pat(seed.samples), span(seed.samples.size()) {
        std::int64_t sumC = 0, sumC2 = 0;
        for (sample_t v : pat) {
            sumC += v;
            sumC2 += std::int64_t(v) * v;
        }
        varC = double(span) * double(sumC2) - double(sumC) * double(sumC);
        patSum = sumC;

        prefix1.resize(rec.size() + 1, 0);
        prefix2.resize(rec.size() + 1, 0);
        for (std::size_t i = 0; i < rec.size(); ++i) {
            prefix1[i + 1] = prefix1[i] + rec[i];
            prefix2[i + 1] = prefix2[i] + std::int64_t(rec[i]) * rec[i];
        }
    }

    bool seed_constant() const noexcept { return varC <= 0.0; }
    std::size_t window_span() const noexcept { return span; }
    std::size_t last_start() const noexcept { return rec.size() - span; }

    /// Correlation of the window starting at w; -2 when undefined
    /// (constant window).
    double at(std::size_t w) const {
        const std::int64_t sumT = prefix1[w + span] - prefix1[w];
        const std::int64_t sumT2 = prefix2[w + span] - prefix2[w];
        const double varT = double(span) * double(sumT2) - double(sumT) * double(sumT);
        if (varT <= 0.0)
            return -2.0;
        std::int64_t dot = 0;
        const sample_t *t = rec.data() + w;
        const sample_t *c = pat.data();
        for (std::size_t i = 0; i < span; ++i)
            dot += std::int32_t(t[i]) * std::int32_t(c[i]);
        const double num = double(span) * double(dot) - double(sumT) * double(patSum);
        return num / std::sqrt(varT * varC);
    }

  private:
    const std::vector<sample_t> &rec;
    const std::vector<sample_t> &pat;
    std::size_t span;
    std::int64_t patSum = 0;
    double varC = 0.0;
    std::vector<std::int64_t> prefix1;
    std::vector<std::int64_t> prefix2;
};

struct SlotScan {
    std::uint64_t best_pos = 0;
    double best_corr = -2.0;
};

SlotScan scan_slot(const NccScanner &scanner, std::int64_t lo, std::int64_t hi) {
    SlotScan out;
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, std::int64_t(scanner.last_start()));
    for (std::int64_t w = lo; w <= hi; ++w) {
        const double r = scanner.at(std::size_t(w));
        if (r > out.best_corr) {
            out.best_corr = r;
            out.best_pos = std::uint64_t(w);
        }
    }
    return out;
}

std::string below_threshold_reason(double corr, double threshold) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "correlation %.3f below threshold %.3f", corr, threshold);
    return buf;
}

} // namespace

LocatedOperations locate_operations(const Trace &recording, const Trace &seed_segment,
                                    const LocatorParams &params) {
    if (seed_segment.size() < 2)
        raise(ErrorKind::invalid_argument, "seed segment needs at least 2 samples");
    if (seed_segment.size() >= recording.size())
        raise(ErrorKind::invalid_argument, "seed segment must be shorter than the recording");
    if (params.coarse_step < 1)
        raise(ErrorKind::invalid_argument, "coarse step must be >= 1");

    NccScanner scanner(recording, seed_segment);
    if (scanner.seed_constant())
        raise(ErrorKind::undefined_correlation, "seed segment is constant");

    const std::size_t span = scanner.window_span();
    const std::size_t lastStart = scanner.last_start();
    const double threshold = params.correlation_threshold;
    const double gate = std::max(0.0, threshold - 0.25);

    LocatedOperations out;
    out.span = span;

    // Coarse scan, then step-1 refinement around every coarse candidate.
    struct Candidate {
        std::uint64_t pos;
        double corr;
    };
    std::vector<Candidate> candidates;
    std::size_t fineCursor = 0; // first index not yet fine-scanned
    const std::size_t step = params.coarse_step;
    for (std::size_t w = 0; w <= lastStart; w += step) {
        if (scanner.at(w) < gate)
            continue;
        const std::size_t lo = std::max(fineCursor, w > step ? w - step + 1 : 0);
        const std::size_t hi = std::min(lastStart, w + step - 1);
        for (std::size_t f = lo; f <= hi; ++f) {
            const double r = scanner.at(f);
            if (r >= threshold)
                candidates.push_back({f, r});
        }
        fineCursor = hi + 1;
    }

    // Non-maximum suppression within one span.
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (candidates[a].corr != candidates[b].corr)
            return candidates[a].corr > candidates[b].corr;
        return candidates[a].pos < candidates[b].pos;
    });
    std::set<std::uint64_t> accepted;
    for (std::size_t idx : order) {
        const std::uint64_t pos = candidates[idx].pos;
        auto next = accepted.lower_bound(pos);
        if (next != accepted.end() && *next - pos < span)
            continue;
        if (next != accepted.begin() && pos - *std::prev(next) < span)
            continue;
        accepted.insert(pos);
    }
    out.locations.assign(accepted.begin(), accepted.end());

    // Look for deformed operations: expected slots (from the median spacing
    // of the accepted set) whose best correlation lands between the reject
    // floor and the threshold.
    if (out.locations.size() >= 3) {
        std::vector<std::uint64_t> gaps;
        gaps.reserve(out.locations.size() - 1);
        for (std::size_t i = 1; i < out.locations.size(); ++i)
            gaps.push_back(out.locations[i] - out.locations[i - 1]);
        std::sort(gaps.begin(), gaps.end());
        const std::uint64_t period = gaps[gaps.size() / 2];
        const std::int64_t half = std::int64_t(period) / 2;

        auto consider = [&](std::int64_t expected, std::int64_t clampLo,
                            std::int64_t clampHi) -> int {
            const SlotScan slot = scan_slot(scanner, std::max(expected - half, clampLo),
                                            std::min(expected + half, clampHi));
            if (slot.best_corr >= threshold) {
                // A genuine match the coarse gate skipped; keep it.
                auto it = std::lower_bound(out.locations.begin(), out.locations.end(),
                                           slot.best_pos);
                const bool clashNext =
                    it != out.locations.end() && *it - slot.best_pos < span;
                const bool clashPrev =
                    it != out.locations.begin() && slot.best_pos - *std::prev(it) < span;
                if (!clashNext && !clashPrev)
                    out.locations.insert(it, slot.best_pos);
                return 1;
            }
            if (slot.best_corr >= params.reject_floor) {
                out.rejected.push_back(
                    {slot.best_pos, below_threshold_reason(slot.best_corr, threshold)});
                return 1;
            }
            return 0; // background; nothing operation-like here
        };

        // Interior gaps wide enough for missing slots.
        const std::vector<std::uint64_t> fixedLocations = out.locations;
        for (std::size_t i = 1; i < fixedLocations.size(); ++i) {
            const std::uint64_t gap = fixedLocations[i] - fixedLocations[i - 1];
            if (double(gap) < 1.7 * double(period))
                continue;
            const std::uint64_t slots = gap / period - 1;
            for (std::uint64_t q = 1; q <= slots; ++q) {
                const std::int64_t expected =
                    std::int64_t(fixedLocations[i - 1]) + std::int64_t(q * gap / (slots + 1));
                consider(expected, std::int64_t(fixedLocations[i - 1] + span),
                         std::int64_t(fixedLocations[i] - span));
            }
        }

        // Extrapolate before the first and after the last accepted location.
        std::uint64_t lookout = 8;
        if (params.expected_count) {
            const std::uint64_t found = out.locations.size() + out.rejected.size();
            lookout = *params.expected_count > found ? *params.expected_count - found : 0;
        }
        const std::uint64_t first = out.locations.front();
        for (std::uint64_t q = 1; q <= lookout; ++q) {
            const std::int64_t expected = std::int64_t(first) - std::int64_t(q * period);
            if (expected + half < 0)
                break;
            if (consider(expected, 0, std::int64_t(first) - std::int64_t(span)) == 0)
                break;
        }
        const std::uint64_t last = out.locations.back();
        for (std::uint64_t q = 1; q <= lookout; ++q) {
            const std::int64_t expected = std::int64_t(last) + std::int64_t(q * period);
            if (expected - half > std::int64_t(lastStart))
                break;
            if (consider(expected, std::int64_t(last + span), std::int64_t(lastStart)) == 0)
                break;
        }
        std::sort(out.rejected.begin(), out.rejected.end(),
                  [](const auto &a, const auto &b) { return a.index < b.index; });
    }
    return out;
}

Template build_template(const Trace &recording, const LocatedOperations &ops,
                        std::uint64_t length_n, std::uint32_t positional_buffer) {
    if (ops.locations.empty())
        raise(ErrorKind::invalid_argument, "cannot average an empty set of operations");
    if (length_n < 1)
        raise(ErrorKind::invalid_argument, "template length must be >= 1");
    for (std::uint64_t loc : ops.locations) {
        if (loc + length_n > recording.size())
            raise(ErrorKind::invalid_argument,
                  "operation window at " + std::to_string(loc) + " exceeds the recording");
    }

    std::vector<std::int64_t> sums(length_n, 0);
    for (std::uint64_t loc : ops.locations) {
        const sample_t *w = recording.samples.data() + loc;
        for (std::uint64_t i = 0; i < length_n; ++i)
            sums[i] += w[i];
    }

    Template tpl;
    tpl.positional_buffer = positional_buffer;
    tpl.samples.resize(length_n);
    const std::int64_t count = std::int64_t(ops.locations.size());
    for (std::uint64_t i = 0; i < length_n; ++i) {
        const std::int64_t s = sums[i];
        std::int64_t q = s / count;
        const std::int64_t r = s % count;
        if (2 * std::abs(r) >= count)
            q += (s < 0 ? -1 : 1);
        tpl.samples[i] = static_cast<sample_t>(q);
    }
    return tpl;
}

std::pair<IntervalTemplate, CalibrationReport>
calibrate(const Trace &recording, const LocatedOperations &ops, const Template &tpl,
          std::uint32_t offset_min, std::uint32_t offset_max, const CalibrationOptions &opts) {
    validate_template(tpl, opts.precision);
    if (ops.locations.empty())
        raise(ErrorKind::invalid_argument, "calibration needs at least one located operation");
    if (offset_min > offset_max)
        raise(ErrorKind::invalid_argument, "empty offset range");
    if (opts.background_step < 1)
        raise(ErrorKind::invalid_argument, "background step must be >= 1");

    const std::size_t m = tpl.compared_positions();
    const std::size_t stride = tpl.stride;
    const std::size_t w = tpl.window_span();
    const std::size_t len = recording.size();
    if (w > len)
        raise(ErrorKind::invalid_argument, "template window longer than the recording");
    const std::size_t nOffsets = offset_max - offset_min + 1;

    // Per-window score for every offset at once: score(o) is the number of
    // compared positions with |trace - template| <= o, so one pass over the
    // absolute differences feeds the whole sweep. (Corridor clamping cannot
    // change the indicator for in-range samples.)
    std::vector<std::uint32_t> hist(offset_max + 2, 0);
    auto sweep_window = [&](std::size_t at, std::vector<std::int64_t> &into) {
        std::fill(hist.begin(), hist.end(), 0);
        const sample_t *t = recording.samples.data() + at;
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint32_t diff =
                std::uint32_t(std::abs(std::int32_t(t[i * stride]) - std::int32_t(tpl.samples[i * stride])));
            hist[std::min<std::size_t>(diff, offset_max + 1)]++;
        }
        std::uint32_t cum = 0;
        for (std::uint32_t d = 0; d <= offset_max; ++d) {
            cum += hist[d];
            if (d >= offset_min)
                into[d - offset_min] = cum;
        }
    };

    std::vector<std::int64_t> scores(nOffsets);
    std::vector<std::int64_t> trueMin(nOffsets, std::numeric_limits<std::int64_t>::max());
    for (std::uint64_t loc : ops.locations) {
        if (loc + w > len)
            raise(ErrorKind::invalid_argument,
                  "operation window at " + std::to_string(loc) + " exceeds the recording");
        sweep_window(loc, scores);
        for (std::size_t o = 0; o < nOffsets; ++o)
            trueMin[o] = std::min(trueMin[o], scores[o]);
    }

    // Background: every background_step-th start in regions at least one
    // span away from every located operation.
    const std::uint64_t opSpan = ops.span != 0 ? ops.span : w;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> excluded; // half-open
    for (std::uint64_t loc : ops.locations) {
        const std::uint64_t lo = loc > opSpan + w ? loc - opSpan - w + 1 : 0;
        const std::uint64_t hi = loc + 2 * opSpan;
        if (!excluded.empty() && lo <= excluded.back().second)
            excluded.back().second = std::max(excluded.back().second, hi);
        else
            excluded.emplace_back(lo, hi);
    }

    std::vector<std::int64_t> bgMax(nOffsets, -1);
    std::uint64_t bgCount = 0;
    std::size_t exclIdx = 0;
    for (std::uint64_t i = 0; i + w <= len; i += opts.background_step) {
        while (exclIdx < excluded.size() && excluded[exclIdx].second <= i)
            ++exclIdx;
        if (exclIdx < excluded.size() && i >= excluded[exclIdx].first)
            continue;
        sweep_window(i, scores);
        ++bgCount;
        for (std::size_t o = 0; o < nOffsets; ++o)
            bgMax[o] = std::max(bgMax[o], scores[o]);
    }

    if (bgCount == 0)
        throw CalibrationError("no operation-free regions available for background scoring",
                               CalibrationReport{offset_min, 0, trueMin[0], 0, 0});

    CalibrationReport best;
    bool haveBest = false;
    for (std::size_t o = 0; o < nOffsets; ++o) {
        const std::int64_t margin = trueMin[o] - bgMax[o];
        if (!haveBest || margin > best.margin) {
            haveBest = true;
            best.chosen_offset = offset_min + std::uint32_t(o);
            best.true_score_min = trueMin[o];
            best.background_score_max = bgMax[o];
            best.margin = margin;
            const std::int64_t mid = (trueMin[o] + bgMax[o] + 1) / 2;
            best.chosen_threshold =
                std::uint32_t(std::clamp<std::int64_t>(mid, 0, std::int64_t(m)));
        }
    }

    if (best.margin <= 0)
        throw CalibrationError("no offset in [" + std::to_string(offset_min) + ", " +
                                   std::to_string(offset_max) +
                                   "] separates operations from background",
                               best);

    IntervalTemplate it = make_interval_template(tpl, best.chosen_offset, opts.precision);
    it.set_threshold(best.chosen_threshold);
    return {std::move(it), best};
}

Template subsample_template(const Template &tpl, std::uint32_t stride) {
    if (stride < 1)
        raise(ErrorKind::invalid_argument, "stride must be >= 1");
    Template out = tpl;
    out.stride = stride;
    return out;
}

} // namespace wm
