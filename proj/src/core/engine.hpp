// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace wm {

/// Excess samples buffered beyond the template: pipeline latency worth of
/// blocks plus the pre-template portion of the operation.
constexpr std::uint64_t compute_excess_samples(std::uint64_t latency_l,
                                               std::uint64_t parallelism_d,
                                               std::uint64_t positional_buffer) {
    return latency_l * parallelism_d + positional_buffer;
}

/// Shift register length: template length plus excess samples.
constexpr std::uint64_t compute_srg_length(std::uint64_t template_length_n,
                                           std::uint64_t excess) {
    return template_length_n + excess;
}

struct EngineConfig {
    std::uint32_t parallelism_d = 32; ///< samples ingested per clock cycle
    std::uint32_t precision_p = kDefaultPrecision;
    std::uint32_t latency_l = 4; ///< pipeline cycles until a valid is emitted
    std::uint32_t positional_buffer = 0;
    /// Lockout after an accepted match; 0 selects the default (one window span).
    std::uint64_t holdoff_samples = 0;
    /// Trigger pulse width; 0 selects the default (one window span).
    std::uint64_t trigger_duration_samples = 0;
    /// Fill value for the register at reset and for trailing partial blocks.
    sample_t idle_fill = 0;
};

struct MatchEvent {
    std::uint64_t start_index = 0; ///< absolute stream index of the matched window
    std::uint32_t lane = 0;        ///< start_index mod parallelism_d
    std::uint32_t score = 0;
    std::uint64_t trigger_index = 0; ///< first stream sample with the trigger asserted
};

/// Snapshot of the trigger logic after a step. asserted implies
/// remaining_duration > 0; no new trigger is accepted while
/// holdoff_remaining > 0.
struct TriggerState {
    bool asserted = false;
    std::uint64_t remaining_duration = 0; ///< output samples left in the current pulse
    std::uint64_t holdoff_remaining = 0;  ///< window starts still locked out
};

/// Block-organized shift register: `stage_count` stages of `block_width`
/// samples each. Pushing one block shifts every stage by one position and
/// evicts the oldest block. The readable window exposes all stored samples
/// in arrival order (oldest first).
class ShiftRegisterModel {
  public:
    ShiftRegisterModel(std::uint32_t block_width, std::uint32_t stage_count, sample_t fill);

    /// Shifts in one block of exactly block_width samples; the samples
    /// leaving the last stage are copied to `evicted` (same width).
    void push_block(std::span<const sample_t> block, std::span<sample_t> evicted);

    /// All stored samples, oldest first. Valid until the next push.
    std::span<const sample_t> window() const noexcept {
        return {storage.data() + head, capacitySamples};
    }

    std::uint32_t block_width() const noexcept { return width; }
    std::uint32_t stage_count() const noexcept { return stages; }
    std::size_t capacity() const noexcept { return capacitySamples; }

  private:
    std::uint32_t width;
    std::uint32_t stages;
    std::size_t capacitySamples;
    std::size_t head = 0; ///< physical index of the oldest sample, in [0, capacity)
    // Mirrored ring: samples are stored twice, at [i] and [i + capacity], so
    // the logical window is always one contiguous span.
    std::vector<sample_t> storage;
};

/// One engine step's view of the datapath outputs. Spans point into engine
/// buffers and stay valid until the next step.
struct StepResult {
    /// d passthrough samples: the input stream delayed by output_delay_samples().
    std::span<const sample_t> output;
    /// valid[j] = 1 iff the window whose start index is congruent to j
    /// (mod d) was evaluated this cycle and met the threshold.
    std::span<const std::uint8_t> valid;
    /// Per-sample trigger bits aligned to `output` (same indexing).
    std::span<const std::uint8_t> trigger_bits;
    /// OR of trigger_bits: the cycle-granular trigger line.
    bool trigger = false;
};

/// Cycle-accurate model of the parallel matching datapath: a d-samples-per-
/// cycle shift register, d matcher lanes with interval comparators and an
/// adder tree, and trigger logic with hold-off.
///
/// Every stream start index is evaluated exactly once, at the cycle its
/// n-sample window completes. Matches are reported in strictly increasing
/// start order; the trigger logic accepts a match only if it starts at
/// least holdoff_samples after the previously accepted one. The trigger
/// pulse for an accepted match covers the matched operation (positional
/// buffer included) as it traverses the delayed sample output.
class Engine {
  public:
    Engine(IntervalTemplate it, EngineConfig cfg);

    /// Processes one block of exactly parallelism_d samples.
    StepResult step(std::span<const sample_t> block);

    /// File-mode boundary discipline: windows starting after
    /// `last_start_inclusive` are never reported valid (their spans would
    /// extend past the true stream end).
    void limit_valid_windows(std::uint64_t last_start_inclusive);

    const EngineConfig &config() const noexcept { return cfg; }
    const IntervalTemplate &interval_template() const noexcept { return it; }

    std::uint64_t cycles() const noexcept { return cycleCount; }
    std::uint64_t samples_pushed() const noexcept { return cycleCount * cfg.parallelism_d; }
    /// Constant passthrough delay: srg capacity (whole blocks) minus one block.
    std::uint64_t output_delay_samples() const noexcept { return srg.capacity() - cfg.parallelism_d; }
    std::uint64_t srg_length() const noexcept { return srgLength; }
    std::uint64_t excess_samples() const noexcept {
        return compute_excess_samples(cfg.latency_l, cfg.parallelism_d, cfg.positional_buffer);
    }
    std::uint64_t window_span() const noexcept { return it.window_span(); }

    /// Accepted matches so far, in start-index order.
    const std::vector<MatchEvent> &events() const noexcept { return acceptedEvents; }
    void clear_events() { acceptedEvents.clear(); }

    TriggerState trigger_state() const noexcept;

  private:
    struct Pulse {
        std::uint64_t begin;
        std::uint64_t end;
    };

    std::uint32_t lane_score(std::span<const sample_t> window, std::size_t pos) const;

    IntervalTemplate it;
    EngineConfig cfg;
    ShiftRegisterModel srg;
    std::uint64_t srgLength;
    std::uint64_t cycleCount = 0;
    std::uint64_t validLimit; ///< last start index allowed to report valid
    bool holdoffArmed = false;
    std::uint64_t lastAcceptedStart = 0;
    std::deque<Pulse> pendingPulses;
    std::vector<MatchEvent> acceptedEvents;
    std::vector<sample_t> outputBuf;
    std::vector<std::uint8_t> validBuf;
    std::vector<std::uint8_t> triggerBuf;
};

/// Drives the engine over a whole trace (padding the trailing partial block
/// with the idle fill and flushing the register) and returns all accepted
/// events plus the full-rate trigger waveform, one bit per stream sample.
struct EngineRun {
    std::vector<MatchEvent> events;
    std::vector<std::uint8_t> trigger_waveform;
};

EngineRun run_engine(const Trace &stream, const IntervalTemplate &it, const EngineConfig &cfg);

/// Straight-line reference matcher: evaluates every window start in
/// increasing order with interval_score and applies the same hold-off
/// policy as the engine. Independent of the datapath simulation; serves as
/// its correctness oracle.
std::vector<MatchEvent> scalar_reference_match(const Trace &stream, const IntervalTemplate &it,
                                               const EngineConfig &cfg);

struct BatchHit {
    std::uint64_t start_index;
    std::uint32_t score;
};

/// Throughput-optimized matcher without cycle simulation or hold-off:
/// returns every window meeting the threshold. Start-index set equals
/// scalar_reference_match with hold-off 1.
std::vector<BatchHit> batch_match(const Trace &stream, const IntervalTemplate &it);

} // namespace wm
