// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "core/engine.hpp"
#include "core/similarity.hpp"

using namespace wm;

namespace {

Trace zeros(std::size_t len) {
    Trace t;
    t.samples.assign(len, 0);
    return t;
}

void place(Trace &t, const Template &tpl, std::size_t pos) {
    REQUIRE(pos + tpl.samples.size() <= t.samples.size());
    std::copy(tpl.samples.begin(), tpl.samples.end(), t.samples.begin() + pos);
}

Template small_template() {
    Template tpl;
    tpl.samples = {50, 90, 70, 120, 60};
    return tpl;
}

std::vector<std::uint64_t> starts_of(const std::vector<MatchEvent> &events) {
    std::vector<std::uint64_t> out;
    for (const auto &e : events)
        out.push_back(e.start_index);
    return out;
}

} // namespace

TEST_CASE("excess samples and register length follow the sizing formulas") {
    CHECK(compute_excess_samples(4, 32, 0) == 128);
    CHECK(compute_excess_samples(0, 32, 0) == 0);
    CHECK(compute_excess_samples(4, 32, 100) == 228);
    CHECK(compute_srg_length(1400, 128) == 1528);
    CHECK(compute_srg_length(2800, 0) == 2800);
    CHECK(compute_srg_length(2800, 228) == 3028);

    std::mt19937 rng(31);
    std::uniform_int_distribution<std::uint64_t> latency(0, 64), width(1, 64), buffer(0, 5000),
        length(1, 100000);
    for (int iter = 0; iter < 1000; ++iter) {
        const std::uint64_t l = latency(rng), d = width(rng), b = buffer(rng), n = length(rng);
        // Independent route: repeated addition instead of multiplication.
        std::uint64_t expect = b;
        for (std::uint64_t i = 0; i < l; ++i)
            expect += d;
        CHECK(compute_excess_samples(l, d, b) == expect);
        CHECK(compute_srg_length(n, expect) == expect + n);
    }
}

TEST_CASE("shift register shifts one stage per push and exposes arrival order") {
    ShiftRegisterModel srg(4, 3, 0);
    CHECK(srg.capacity() == 12);

    std::vector<sample_t> out(4);
    const std::vector<sample_t> b0{0, 1, 2, 3}, b1{4, 5, 6, 7}, b2{8, 9, 10, 11},
        b3{12, 13, 14, 15};

    srg.push_block(b0, out);
    CHECK(out == std::vector<sample_t>(4, 0)); // still priming
    srg.push_block(b1, out);
    CHECK(out == std::vector<sample_t>(4, 0));
    srg.push_block(b2, out);
    CHECK(out == b0); // first block reaches the final stage after 2 shifts

    const auto window = srg.window();
    const std::vector<sample_t> expect{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    CHECK(std::vector<sample_t>(window.begin(), window.end()) == expect);

    srg.push_block(b3, out);
    CHECK(out == b1); // oldest block evicted, everything moved one stage
}

TEST_CASE("engine rejects blocks of the wrong width and undersized registers") {
    const Template tpl = small_template();
    IntervalTemplate it = make_interval_template(tpl, 5);

    Engine engine(it, EngineConfig{.parallelism_d = 8});
    std::vector<sample_t> bad(7, 0);
    CHECK_THROWS_AS((void)engine.step(bad), Error);

    // latency 0 with no positional buffer cannot cover the d-1 extra lane
    // starts per cycle.
    CHECK_THROWS_AS(Engine(it, EngineConfig{.parallelism_d = 8, .latency_l = 0}), Error);
}

TEST_CASE("all-zero stream with a corridor excluding zero never goes valid") {
    const Template tpl = small_template();
    IntervalTemplate it = make_interval_template(tpl, 10);
    it.set_threshold(1);

    const EngineRun run = run_engine(zeros(4096), it, EngineConfig{.parallelism_d = 32});
    CHECK(run.events.empty());
    CHECK(std::count(run.trigger_waveform.begin(), run.trigger_waveform.end(), 1) == 0);
}

TEST_CASE("perfect match at a d-aligned offset pulses lane 0 exactly once") {
    const Template tpl = small_template();
    const IntervalTemplate it = make_interval_template(tpl, 0); // threshold m
    Trace stream = zeros(512);
    place(stream, tpl, 64);

    const EngineConfig cfg{.parallelism_d = 8};
    const EngineRun run = run_engine(stream, it, cfg);
    REQUIRE(run.events.size() == 1);
    CHECK(run.events[0].start_index == 64);
    CHECK(run.events[0].lane == 0);
    CHECK(run.events[0].score == 5);
    CHECK(run.events[0].trigger_index == 64);

    // Raw datapath view: exactly one valid pulse, on lane 0.
    Engine engine(it, cfg);
    std::size_t validCycles = 0;
    for (std::size_t k = 0; k < stream.size() / 8 + engine.output_delay_samples() / 8; ++k) {
        std::vector<sample_t> block(8, 0);
        for (std::size_t r = 0; r < 8; ++r) {
            const std::size_t idx = 8 * k + r;
            if (idx < stream.size())
                block[r] = stream.samples[idx];
        }
        const StepResult res = engine.step(block);
        for (std::size_t j = 0; j < 8; ++j) {
            if (res.valid[j]) {
                ++validCycles;
                CHECK(j == 0);
            }
        }
    }
    CHECK(validCycles == 1);
}

TEST_CASE("match at start 7 mod 32 reports lane 7 and agrees with the oracle") {
    const Template tpl = small_template();
    const IntervalTemplate it = make_interval_template(tpl, 0);
    Trace stream = zeros(2048);
    place(stream, tpl, 7 + 32 * 13);

    const EngineConfig cfg{.parallelism_d = 32};
    const EngineRun run = run_engine(stream, it, cfg);
    REQUIRE(run.events.size() == 1);
    CHECK(run.events[0].lane == 7);
    CHECK(run.events[0].start_index % 32 == 7);

    const auto oracle = scalar_reference_match(stream, it, cfg);
    REQUIRE(oracle.size() == 1);
    CHECK(oracle[0].start_index == run.events[0].start_index);
    CHECK(oracle[0].score == run.events[0].score);
    CHECK(oracle[0].lane == 7);
}

TEST_CASE("scalar reference finds every embedding when hold-off allows") {
    const Template tpl = small_template();
    const IntervalTemplate it = make_interval_template(tpl, 2);
    Trace stream = zeros(50 * 40 + 200);
    std::vector<std::uint64_t> expected;
    for (int i = 0; i < 50; ++i) {
        place(stream, tpl, 25 + 40 * std::size_t(i));
        expected.push_back(25 + 40 * std::uint64_t(i));
    }
    const auto events = scalar_reference_match(stream, it, EngineConfig{});
    CHECK(starts_of(events) == expected);
}

TEST_CASE("empty stream produces an empty run") {
    const IntervalTemplate it = make_interval_template(small_template(), 1);
    const EngineRun run = run_engine(Trace{}, it, EngineConfig{});
    CHECK(run.events.empty());
    CHECK(run.trigger_waveform.empty());
}

TEST_CASE("hold-off collapses matches closer than holdoff_samples") {
    const Template tpl = small_template();
    const std::uint64_t w = tpl.window_span();
    const IntervalTemplate it = make_interval_template(tpl, 0);

    Trace stream = zeros(1024);
    place(stream, tpl, 100);
    place(stream, tpl, 100 + w + 2);

    EngineConfig cfg{.parallelism_d = 16, .holdoff_samples = w + 10};
    CHECK(run_engine(stream, it, cfg).events.size() == 1);
    CHECK(scalar_reference_match(stream, it, cfg).size() == 1);

    cfg.holdoff_samples = w + 2; // exactly the spacing: second match allowed
    CHECK(run_engine(stream, it, cfg).events.size() == 2);
}

TEST_CASE("trigger waveform covers the matched operation for the configured duration") {
    const Template tpl = small_template();
    const std::uint64_t w = tpl.window_span();
    const IntervalTemplate it = make_interval_template(tpl, 0);

    Trace stream = zeros(640);
    place(stream, tpl, 96);

    SUBCASE("default duration is the window span") {
        const EngineRun run = run_engine(stream, it, EngineConfig{.parallelism_d = 32});
        for (std::size_t i = 0; i < stream.size(); ++i)
            CHECK(run.trigger_waveform[i] == (i >= 96 && i < 96 + w ? 1 : 0));
    }
    SUBCASE("explicit duration and positional buffer shift the pulse") {
        const EngineConfig cfg{.parallelism_d = 32,
                               .positional_buffer = 10,
                               .trigger_duration_samples = 20};
        const EngineRun run = run_engine(stream, it, cfg);
        REQUIRE(run.events.size() == 1);
        CHECK(run.events[0].trigger_index == 86);
        for (std::size_t i = 0; i < stream.size(); ++i)
            CHECK(run.trigger_waveform[i] == (i >= 86 && i < 106 ? 1 : 0));
    }
}

TEST_CASE("sample output is the input delayed by a constant number of samples") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> dist(-2000, 2000);
    Trace stream = zeros(777); // deliberately not a multiple of d
    for (auto &v : stream.samples)
        v = sample_t(dist(rng));

    const IntervalTemplate it = make_interval_template(small_template(), 3);
    const EngineConfig cfg{.parallelism_d = 16, .latency_l = 3, .idle_fill = 0};
    Engine engine(it, cfg);
    const std::uint64_t delay = engine.output_delay_samples();

    std::vector<sample_t> out;
    const std::size_t cycles = (stream.size() + 15) / 16 + delay / 16;
    for (std::size_t k = 0; k < cycles; ++k) {
        std::vector<sample_t> block(16, 0);
        for (std::size_t r = 0; r < 16; ++r) {
            const std::size_t idx = 16 * k + r;
            if (idx < stream.size())
                block[r] = stream.samples[idx];
        }
        const StepResult res = engine.step(block);
        out.insert(out.end(), res.output.begin(), res.output.end());
    }

    REQUIRE(out.size() >= delay + stream.size());
    for (std::size_t i = 0; i < delay; ++i)
        CHECK(out[i] == 0);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        REQUIRE(out[delay + i] == stream.samples[i]);
    }
}

TEST_CASE("trigger state tracks assertion, duration, and hold-off") {
    const Template tpl = small_template();
    const IntervalTemplate it = make_interval_template(tpl, 0);
    Trace stream = zeros(512);
    place(stream, tpl, 64);

    // Pulse wider than one block, so the per-step snapshot can observe it.
    const EngineConfig cfg{
        .parallelism_d = 8, .holdoff_samples = 300, .trigger_duration_samples = 100};
    Engine engine(it, cfg);
    CHECK_FALSE(engine.trigger_state().asserted);

    bool sawAsserted = false;
    std::uint64_t peakHoldoff = 0;
    for (std::size_t k = 0; k < 90; ++k) {
        std::vector<sample_t> block(8, 0);
        for (std::size_t r = 0; r < 8; ++r) {
            const std::size_t idx = 8 * k + r;
            if (idx < stream.size())
                block[r] = stream.samples[idx];
        }
        (void)engine.step(block);
        const TriggerState ts = engine.trigger_state();
        if (ts.asserted) {
            sawAsserted = true;
            CHECK(ts.remaining_duration > 0);
            CHECK(ts.remaining_duration <= 100);
        }
        peakHoldoff = std::max(peakHoldoff, ts.holdoff_remaining);
    }
    CHECK(sawAsserted);
    CHECK(peakHoldoff > 0);
    CHECK(peakHoldoff <= 300);
}

TEST_CASE("batch match equals the scalar reference without hold-off") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> noise(-40, 40);
    for (int iter = 0; iter < 20; ++iter) {
        Template tpl;
        std::uniform_int_distribution<int> value(-3000, 3000);
        const std::size_t n = 8 + std::size_t(rng() % 40);
        for (std::size_t i = 0; i < n; ++i)
            tpl.samples.push_back(sample_t(value(rng)));
        tpl.stride = 1 + std::uint32_t(rng() % 3);

        IntervalTemplate it = make_interval_template(tpl, 50);
        it.set_threshold(std::uint32_t(it.size() * 3 / 4));

        Trace stream = zeros(3000);
        for (auto &v : stream.samples)
            v = sample_t(value(rng));
        for (std::size_t pos = 100; pos + n < 2900; pos += 700) {
            place(stream, tpl, pos);
            for (std::size_t i = 0; i < n; ++i)
                stream.samples[pos + i] = sample_t(stream.samples[pos + i] + noise(rng) / 2);
        }

        const auto hits = batch_match(stream, it);
        const auto ref = scalar_reference_match(stream, it, EngineConfig{.holdoff_samples = 1});
        REQUIRE(hits.size() == ref.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            CHECK(hits[i].start_index == ref[i].start_index);
            CHECK(hits[i].score == ref[i].score);
        }
    }
}

TEST_CASE("threshold 0 matches every window start") {
    const Template tpl = small_template();
    IntervalTemplate it = make_interval_template(tpl, 1);
    it.set_threshold(0);
    Trace stream = zeros(100);
    const auto hits = batch_match(stream, it);
    CHECK(hits.size() == 100 - tpl.window_span() + 1);
}

TEST_CASE("oracle equivalence and d-invariance on randomized noisy streams") {
    std::mt19937 rng(43);
    for (int iter = 0; iter < 25; ++iter) {
        const std::size_t n = 8 + std::size_t(rng() % 56);
        const std::uint32_t stride = std::uint32_t(1) << (rng() % 3);
        const std::uint32_t offset = std::uint32_t(rng() % 24);
        std::uniform_int_distribution<int> value(-3000, 3000);

        Template tpl;
        for (std::size_t i = 0; i < n; ++i)
            tpl.samples.push_back(sample_t(value(rng)));
        tpl.stride = stride;

        IntervalTemplate it = make_interval_template(tpl, offset);
        const std::uint32_t m = std::uint32_t(it.size());
        it.set_threshold(std::max<std::uint32_t>(1, m - std::uint32_t(rng() % (m / 4 + 1))));

        std::uniform_int_distribution<int> jitter(-int(offset), int(offset));
        Trace stream = zeros(4000 + rng() % 3000);
        for (auto &v : stream.samples)
            v = sample_t(value(rng));
        for (int e = 0; e < 4; ++e) {
            const std::size_t pos = 100 + (rng() % (stream.size() - n - 200));
            place(stream, tpl, pos);
            if (offset > 0)
                for (std::size_t i = 0; i < n; ++i)
                    stream.samples[pos + i] = sample_t(stream.samples[pos + i] + jitter(rng));
        }

        const std::uint64_t holdoff = 1 + rng() % (2 * tpl.window_span());
        EngineConfig cfg{.holdoff_samples = holdoff};
        const auto oracle = scalar_reference_match(stream, it, cfg);

        std::vector<std::uint64_t> previous;
        bool first = true;
        for (std::uint32_t d : {1u, 2u, 4u, 8u, 16u, 32u}) {
            cfg.parallelism_d = d;
            cfg.latency_l = 2 + (d % 3);
            const EngineRun run = run_engine(stream, it, cfg);
            REQUIRE(run.events.size() == oracle.size());
            for (std::size_t i = 0; i < run.events.size(); ++i) {
                CHECK(run.events[i].start_index == oracle[i].start_index);
                CHECK(run.events[i].score == oracle[i].score);
                CHECK(run.events[i].lane == run.events[i].start_index % d);
            }
            const auto starts = starts_of(run.events);
            if (!first)
                CHECK(starts == previous);
            previous = starts;
            first = false;
        }
    }
}

TEST_CASE("strided matching equals the collapsed template on the decimated stream") {
    std::mt19937 rng(44);
    std::uniform_int_distribution<int> value(-3000, 3000);
    const std::uint32_t s = 4;

    Template full;
    for (int i = 0; i < 48; ++i)
        full.samples.push_back(sample_t(value(rng)));
    Template strided = full;
    strided.stride = s;

    // Noiseless embeddings at s-aligned positions.
    Trace stream = zeros(2000);
    for (std::size_t pos : {100u, 600u, 1200u})
        place(stream, full, pos);

    Template collapsed;
    for (std::size_t i = 0; i < full.samples.size(); i += s)
        collapsed.samples.push_back(full.samples[i]);
    Trace decimated;
    for (std::size_t i = 0; i < stream.size(); i += s)
        decimated.samples.push_back(stream.samples[i]);

    const IntervalTemplate itStrided = make_interval_template(strided, 0);
    const IntervalTemplate itCollapsed = make_interval_template(collapsed, 0);

    std::vector<std::uint64_t> aligned;
    for (const auto &hit : batch_match(stream, itStrided)) {
        if (hit.start_index % s == 0)
            aligned.push_back(hit.start_index / s);
    }
    CHECK(aligned == starts_of(scalar_reference_match(
                         decimated, itCollapsed, EngineConfig{.holdoff_samples = 1})));
    CHECK(aligned == std::vector<std::uint64_t>{25, 150, 300});
}
