// SPDX-License-Identifier: Apache-2.0
#include "core/engine.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <string>

#include "core/similarity.hpp"

namespace wm {

ShiftRegisterModel::ShiftRegisterModel(std::uint32_t block_width, std::uint32_t stage_count,
                                       sample_t fill)
    : width(block_width), stages(stage_count),
      capacitySamples(std::size_t(block_width) * stage_count),
      storage(2 * std::size_t(block_width) * stage_count, fill) {
    if (block_width == 0 || stage_count == 0)
        raise(ErrorKind::invalid_argument, "shift register needs width >= 1 and stages >= 1");
}

void ShiftRegisterModel::push_block(std::span<const sample_t> block,
                                    std::span<sample_t> evicted) {
    if (block.size() != width || evicted.size() != width)
        raise(ErrorKind::invalid_argument,
              "block width mismatch: expected " + std::to_string(width));

    head += width;
    if (head >= capacitySamples)
        head -= capacitySamples;
    // New samples occupy the newest logical positions [capacity - width, capacity).
    std::size_t phys = head + capacitySamples - width;
    if (phys >= capacitySamples)
        phys -= capacitySamples;
    for (std::uint32_t r = 0; r < width; ++r) {
        std::size_t p = phys + r;
        if (p >= capacitySamples)
            p -= capacitySamples;
        storage[p] = block[r];
        storage[p + capacitySamples] = block[r];
    }
    // Final stage after the shift: the oldest block now stored.
    const auto view = window();
    std::copy(view.begin(), view.begin() + width, evicted.begin());
}

namespace {

std::uint64_t effective_or_span(std::uint64_t configured, std::uint64_t span) {
    return configured == 0 ? span : configured;
}

} // namespace

Engine::Engine(IntervalTemplate it_, EngineConfig cfg_)
    : it(std::move(it_)), cfg(cfg_),
      srg(1, 1, 0), // placeholder; replaced below once the sizes are validated
      validLimit(std::numeric_limits<std::uint64_t>::max()) {
    validate_interval_template(it);
    validate_precision(cfg.precision_p);
    if (cfg.parallelism_d < 1 || cfg.parallelism_d > 64)
        raise(ErrorKind::invalid_argument, "parallelism d must be in [1, 64]");

    const std::uint64_t span = it.window_span();
    cfg.holdoff_samples = effective_or_span(cfg.holdoff_samples, span);
    cfg.trigger_duration_samples = effective_or_span(cfg.trigger_duration_samples, span);

    const std::uint64_t n = it.source_length != 0 ? it.source_length : span;
    srgLength = compute_srg_length(n, excess_samples());
    const std::uint32_t d = cfg.parallelism_d;
    const std::uint64_t stageCount = (srgLength + d - 1) / d;
    if (stageCount * d < n + d - 1)
        raise(ErrorKind::invalid_argument,
              "shift register too short for the lane windows: l*d + positional_buffer "
              "must be at least d - 1 (increase latency_l)");
    srg = ShiftRegisterModel(d, static_cast<std::uint32_t>(stageCount), cfg.idle_fill);

    outputBuf.resize(d);
    validBuf.resize(d);
    triggerBuf.resize(d);
}

void Engine::limit_valid_windows(std::uint64_t last_start_inclusive) {
    validLimit = last_start_inclusive;
}

std::uint32_t Engine::lane_score(std::span<const sample_t> window, std::size_t pos) const {
    const std::size_t m = it.size();
    const std::size_t s = it.source_stride;
    const std::uint32_t threshold = it.threshold;
    std::uint32_t score = 0;
    for (std::size_t i = 0; i < m; ++i) {
        score += interval_indicator(window[pos + i * s], it.upper[i], it.lower[i]) ? 1u : 0u;
        // Not enough positions left to reach the threshold: the lane cannot
        // go valid, and sub-threshold scores are never reported.
        if (score + (m - 1 - i) < threshold)
            return score;
    }
    return score;
}

StepResult Engine::step(std::span<const sample_t> block) {
    const std::uint32_t d = cfg.parallelism_d;
    if (block.size() != d)
        raise(ErrorKind::invalid_argument,
              "engine block must contain exactly " + std::to_string(d) + " samples");

    const std::uint64_t k = cycleCount++;
    srg.push_block(block, outputBuf);
    std::fill(validBuf.begin(), validBuf.end(), 0);

    const auto window = srg.window();
    const std::int64_t capacity = static_cast<std::int64_t>(srg.capacity());
    const std::uint64_t n = it.source_length != 0 ? it.source_length : it.window_span();
    const std::int64_t newestEnd = static_cast<std::int64_t>((k + 1) * d); // one past newest
    const std::int64_t delay = static_cast<std::int64_t>(output_delay_samples());
    const std::int64_t outFirst = newestEnd - d - delay; // stream index of output[0]

    // Windows whose n-sample extent completed inside this block: start
    // indices in ((k*d) - n, (k+1)*d - n], evaluated in increasing order.
    const std::int64_t evalHigh = newestEnd - static_cast<std::int64_t>(n);
    for (std::int64_t start = evalHigh - d + 1; start <= evalHigh; ++start) {
        if (start < 0 || std::uint64_t(start) > validLimit)
            continue;
        const std::size_t pos = static_cast<std::size_t>(start + capacity - newestEnd);
        const std::uint32_t score = lane_score(window, pos);
        if (score < it.threshold)
            continue;
        const std::uint32_t lane = static_cast<std::uint32_t>(std::uint64_t(start) % d);
        validBuf[lane] = 1;

        if (holdoffArmed && std::uint64_t(start) - lastAcceptedStart < cfg.holdoff_samples)
            continue;
        holdoffArmed = true;
        lastAcceptedStart = std::uint64_t(start);

        std::int64_t pulseBegin = start - std::int64_t(cfg.positional_buffer);
        if (pulseBegin < 0)
            pulseBegin = 0;
        // The pulse cannot assert on output samples already emitted; with
        // latency_l >= 2 this clamp never engages.
        if (pulseBegin < outFirst)
            pulseBegin = outFirst;
        acceptedEvents.push_back({std::uint64_t(start), lane, score, std::uint64_t(pulseBegin)});
        pendingPulses.push_back(
            {std::uint64_t(pulseBegin), std::uint64_t(pulseBegin) + cfg.trigger_duration_samples});
    }

    // Trigger bits for the d output samples of this cycle.
    bool any = false;
    while (!pendingPulses.empty() &&
           pendingPulses.front().end <= std::uint64_t(std::max<std::int64_t>(outFirst, 0)))
        pendingPulses.pop_front();
    for (std::uint32_t r = 0; r < d; ++r) {
        const std::int64_t idx = outFirst + r;
        std::uint8_t bit = 0;
        if (idx >= 0) {
            for (const Pulse &p : pendingPulses) {
                if (p.begin > std::uint64_t(idx))
                    break;
                if (std::uint64_t(idx) < p.end) {
                    bit = 1;
                    break;
                }
            }
        }
        triggerBuf[r] = bit;
        any = any || bit != 0;
    }

    return StepResult{
        {outputBuf.data(), outputBuf.size()},
        {validBuf.data(), validBuf.size()},
        {triggerBuf.data(), triggerBuf.size()},
        any,
    };
}

TriggerState Engine::trigger_state() const noexcept {
    TriggerState ts;
    const std::int64_t outCursor = // one past the last emitted output sample
        std::int64_t(cycleCount * cfg.parallelism_d) - std::int64_t(output_delay_samples());
    if (outCursor > 0) {
        const std::uint64_t last = std::uint64_t(outCursor) - 1;
        for (const Pulse &p : pendingPulses) {
            if (p.begin <= last && last < p.end) {
                ts.asserted = true;
                ts.remaining_duration = p.end - last;
                break;
            }
        }
    }
    if (holdoffArmed) {
        const std::uint64_t n = it.source_length != 0 ? it.source_length : it.window_span();
        const std::int64_t nextStart = std::int64_t(cycleCount * cfg.parallelism_d) -
                                       std::int64_t(n) + 1;
        const std::int64_t lockedUntil =
            std::int64_t(lastAcceptedStart + cfg.holdoff_samples);
        if (lockedUntil > nextStart)
            ts.holdoff_remaining = std::uint64_t(lockedUntil - nextStart);
    }
    return ts;
}

EngineRun run_engine(const Trace &stream, const IntervalTemplate &it, const EngineConfig &cfg) {
    Engine engine(it, cfg);
    const std::uint64_t len = stream.size();
    const std::uint64_t span = engine.window_span();

    EngineRun run;
    run.trigger_waveform.assign(len, 0);
    if (len < span)
        return run;
    engine.limit_valid_windows(len - span);

    const std::uint32_t d = cfg.parallelism_d;
    const std::uint64_t inputCycles = (len + d - 1) / d;
    const std::uint64_t flushCycles = engine.output_delay_samples() / d;
    const std::int64_t delay = static_cast<std::int64_t>(engine.output_delay_samples());

    std::vector<sample_t> block(d, cfg.idle_fill);
    for (std::uint64_t k = 0; k < inputCycles + flushCycles; ++k) {
        for (std::uint32_t r = 0; r < d; ++r) {
            const std::uint64_t idx = k * d + r;
            block[r] = idx < len ? stream.samples[idx] : cfg.idle_fill;
        }
        const StepResult res = engine.step(block);
        const std::int64_t outFirst = std::int64_t(k * d) - delay;
        for (std::uint32_t r = 0; r < d; ++r) {
            const std::int64_t idx = outFirst + r;
            if (idx >= 0 && std::uint64_t(idx) < len)
                run.trigger_waveform[std::size_t(idx)] = res.trigger_bits[r];
        }
    }
    run.events = engine.events();
    return run;
}

std::vector<MatchEvent> scalar_reference_match(const Trace &stream, const IntervalTemplate &it,
                                               const EngineConfig &cfg) {
    validate_interval_template(it);
    const std::uint64_t len = stream.size();
    const std::uint64_t span = it.window_span();
    const std::uint64_t holdoff = cfg.holdoff_samples == 0 ? span : cfg.holdoff_samples;
    const std::uint32_t d = std::max<std::uint32_t>(cfg.parallelism_d, 1);

    std::vector<MatchEvent> events;
    if (len < span)
        return events;

    bool armed = false;
    std::uint64_t lastStart = 0;
    for (std::uint64_t i = 0; i + span <= len; ++i) {
        const std::uint32_t score =
            interval_score({stream.samples.data() + i, std::size_t(span)}, it);
        if (score < it.threshold)
            continue;
        if (armed && i - lastStart < holdoff)
            continue;
        armed = true;
        lastStart = i;
        const std::uint64_t trig =
            i >= cfg.positional_buffer ? i - cfg.positional_buffer : 0;
        events.push_back({i, static_cast<std::uint32_t>(i % d), score, trig});
    }
    return events;
}

std::vector<BatchHit> batch_match(const Trace &stream, const IntervalTemplate &it) {
    validate_interval_template(it);
    const std::size_t len = stream.size();
    const std::size_t span = it.window_span();
    const std::size_t m = it.size();

    std::vector<BatchHit> hits;
    if (len < span)
        return hits;
    const std::size_t starts = len - span + 1;
    const std::size_t stride = it.source_stride;
    const std::uint32_t threshold = it.threshold;
    const sample_t *data = stream.samples.data();

    if (m > std::numeric_limits<std::uint16_t>::max()) {
        // Counter tiles below use 16-bit accumulators; fall back for
        // absurdly long templates.
        for (std::size_t i = 0; i < starts; ++i) {
            const std::uint32_t score = interval_score({data + i, span}, it);
            if (score >= threshold)
                hits.push_back({i, score});
        }
        return hits;
    }

    // Vertical tiling: for each compared position, the samples of a run of
    // consecutive window starts are contiguous, so the in-corridor test
    // vectorizes across starts.
    constexpr std::size_t kTile = 512;
    std::uint16_t acc[kTile];
    for (std::size_t base = 0; base < starts; base += kTile) {
        const std::size_t tile = std::min(kTile, starts - base);
        std::fill(acc, acc + tile, std::uint16_t(0));
        for (std::size_t i = 0; i < m; ++i) {
            const sample_t lo = it.lower[i];
            const sample_t hi = it.upper[i];
            const sample_t *p = data + base + i * stride;
            for (std::size_t t = 0; t < tile; ++t)
                acc[t] = static_cast<std::uint16_t>(acc[t] + ((p[t] >= lo) & (p[t] <= hi)));
        }
        for (std::size_t t = 0; t < tile; ++t) {
            if (acc[t] >= threshold)
                hits.push_back({base + t, acc[t]});
        }
    }
    return hits;
}

} // namespace wm
