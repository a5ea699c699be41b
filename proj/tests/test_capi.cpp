// SPDX-License-Identifier: Apache-2.0
// Exercises the shared-library C surface: handle lifecycles, error codes,
// and a miniature end-to-end pipeline.
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "wavematch/wavematch.h"

namespace {

std::string temp_path(const std::string &name) {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("wavematch-capi-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return (dir / name).string();
}

} // namespace

TEST_CASE("version and error text are always available") {
    CHECK(std::strlen(wm_version()) > 0);
    CHECK(wm_last_error() != nullptr);
}

TEST_CASE("null handles are rejected with the right status codes") {
    CHECK(wm_trace_load(nullptr, nullptr) == WM_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(wm_last_error()) > 0);

    wm_trace *trace = nullptr;
    CHECK(wm_trace_load(temp_path("does-not-exist.wmtr").c_str(), &trace) == WM_ERR_IO);
    CHECK(trace == nullptr);

    CHECK(wm_engine_step(nullptr, nullptr, 0, nullptr, nullptr, nullptr) ==
          WM_ERR_NOT_INITIALIZED);

    double r = 0;
    CHECK(wm_pearson_correlation(nullptr, nullptr, 3, &r) == WM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("trace handles round-trip through create, save, and load") {
    const std::vector<int16_t> samples{0, 100, -100, 8191, -8192};
    wm_trace *trace = nullptr;
    REQUIRE(wm_trace_create(samples.data(), samples.size(), 1e10, 14, &trace) == WM_OK);
    CHECK(wm_trace_count(trace) == 5);
    CHECK(wm_trace_precision(trace) == 14);
    CHECK(wm_trace_samples(trace)[3] == 8191);

    const std::string path = temp_path("capi.wmtr");
    REQUIRE(wm_trace_save(trace, path.c_str()) == WM_OK);
    wm_trace *back = nullptr;
    REQUIRE(wm_trace_load(path.c_str(), &back) == WM_OK);
    CHECK(wm_trace_count(back) == 5);
    CHECK(std::memcmp(wm_trace_samples(back), samples.data(), 5 * sizeof(int16_t)) == 0);

    wm_trace *slice = nullptr;
    REQUIRE(wm_trace_slice(trace, 1, 3, &slice) == WM_OK);
    CHECK(wm_trace_count(slice) == 3);
    CHECK(wm_trace_samples(slice)[0] == 100);
    wm_trace_free(slice);
    slice = nullptr;
    CHECK(wm_trace_slice(trace, 4, 5, &slice) == WM_ERR_INVALID_ARGUMENT);
    CHECK(slice == nullptr);
    wm_trace_free(back);
    wm_trace_free(trace);

    const std::vector<int16_t> outOfRange{9000};
    wm_trace *bad = nullptr;
    CHECK(wm_trace_create(outOfRange.data(), 1, 1.0, 14, &bad) == WM_ERR_RANGE);
    CHECK(bad == nullptr);
}

TEST_CASE("similarity entry points mirror the library semantics") {
    const std::vector<int16_t> t{1, 2, 3, 4};
    const std::vector<int16_t> shifted{11, 12, 13, 14};
    double r = 0;
    REQUIRE(wm_pearson_correlation(t.data(), shifted.data(), 4, &r) == WM_OK);
    CHECK(r == doctest::Approx(1.0));

    const std::vector<int16_t> flat{5, 5, 5, 5};
    CHECK(wm_pearson_correlation(t.data(), flat.data(), 4, &r) ==
          WM_ERR_UNDEFINED_CORRELATION);

    uint64_t s = 0;
    const std::vector<int16_t> a{0, 0}, b{3, -4};
    REQUIRE(wm_sad(a.data(), b.data(), 2, &s) == WM_OK);
    CHECK(s == 7);

    CHECK(wm_interval_indicator(10, 10, 0) == 1);
    CHECK(wm_interval_indicator(11, 10, 0) == 0);
}

TEST_CASE("formulas exposed through the C surface") {
    CHECK(wm_compute_excess_samples(4, 32, 0) == 128);
    CHECK(wm_compute_excess_samples(4, 32, 100) == 228);
    CHECK(wm_compute_srg_length(1400, 128) == 1528);
}

TEST_CASE("resource model through the C surface") {
    wm_device_profile ku85{};
    wm_device_kintex_ku85(&ku85);
    CHECK(std::string(ku85.name) == "KU85");

    wm_resource_estimate est{};
    REQUIRE(wm_estimate_luts(1400, WM_ADDER_LUT_BASED, 32, &ku85, &est) == WM_OK);
    CHECK(est.luts == 338'948);
    CHECK(est.fits == 1);

    uint64_t n = 0;
    REQUIRE(wm_max_template_length(&ku85, WM_ADDER_LUT_BASED, 32, 0.32, &n) == WM_OK);
    CHECK(n == 1400);
}

TEST_CASE("miniature pipeline through the C API only") {
    // Pattern and synthetic recording.
    wm_template *pattern = nullptr;
    REQUIRE(wm_make_smooth_pattern(7, 256, 3000, 8, 16, 256, &pattern) == WM_OK);

    wm_synth_spec *spec = nullptr;
    REQUIRE(wm_synth_spec_create(120'000, 11, &spec) == WM_OK);
    REQUIRE(wm_synth_spec_set_background(spec, "uniform", 200) == WM_OK);
    REQUIRE(wm_synth_spec_add_pattern(spec, "op", pattern) == WM_OK);
    for (int i = 0; i < 16; ++i)
        REQUIRE(wm_synth_spec_add_embedding(spec, "op", 1000 + uint64_t(i) * 7000, 0, 10, 0) ==
                WM_OK);

    wm_trace *recording = nullptr;
    wm_truth *truth = nullptr;
    REQUIRE(wm_synth_generate(spec, &recording, &truth) == WM_OK);
    CHECK(wm_truth_count(truth) == 16);
    CHECK(wm_truth_well_formed(truth, 0) == 1);
    CHECK(std::string(wm_truth_pattern(truth, 0)) == "op");

    // Locate with the pattern itself as the seed.
    wm_trace *seed = nullptr;
    REQUIRE(wm_trace_create(wm_template_samples(pattern), wm_template_length(pattern), 1e10,
                            14, &seed) == WM_OK);
    wm_locate_params params{};
    wm_locate_params_default(&params);
    wm_locations *locations = nullptr;
    REQUIRE(wm_locate_operations(recording, seed, &params, &locations) == WM_OK);
    REQUIRE(wm_locations_count(locations) == 16);
    CHECK(wm_locations_get(locations, 0) == 1000);

    // Template, subsample, calibrate.
    wm_template *averaged = nullptr;
    REQUIRE(wm_build_template(recording, locations, 256, 0, &averaged) == WM_OK);
    wm_template *strided = nullptr;
    REQUIRE(wm_template_subsample(averaged, 4, &strided) == WM_OK);
    CHECK(wm_template_compared_positions(strided) == 64);

    wm_interval_template *corridor = nullptr;
    wm_calibration_report report{};
    REQUIRE(wm_calibrate(recording, locations, strided, 0, 32, 17, &corridor, &report) ==
            WM_OK);
    CHECK(report.margin > 0);
    CHECK(report.chosen_threshold <= 64);

    // Attach + persist + reload the calibrated template.
    REQUIRE(wm_template_attach_calibration(strided, corridor, &report) == WM_OK);
    const std::string tplPath = temp_path("calibrated.json");
    REQUIRE(wm_template_save(strided, tplPath.c_str()) == WM_OK);
    wm_template *reloaded = nullptr;
    REQUIRE(wm_template_load(tplPath.c_str(), &reloaded) == WM_OK);
    CHECK(wm_template_has_calibration(reloaded) == 1);
    wm_interval_template *corridor2 = nullptr;
    REQUIRE(wm_template_interval(reloaded, &corridor2) == WM_OK);
    CHECK(wm_interval_template_threshold(corridor2) == report.chosen_threshold);

    // Engine run vs batch match through the C surface.
    wm_engine_config cfg{};
    wm_engine_config_default(&cfg);
    wm_events *events = nullptr;
    wm_waveform *waveform = nullptr;
    REQUIRE(wm_run_engine(recording, corridor2, &cfg, &events, &waveform) == WM_OK);
    CHECK(wm_events_count(events) == 16);
    CHECK(wm_waveform_length(waveform) == wm_trace_count(recording));

    wm_events *hits = nullptr;
    REQUIRE(wm_batch_match(recording, corridor2, &hits) == WM_OK);
    CHECK(wm_events_count(hits) == 16);
    wm_match_event first{};
    REQUIRE(wm_events_get(events, 0, &first) == WM_OK);
    CHECK(first.start_index == 1000);
    CHECK(first.lane == 1000 % cfg.parallelism_d);

    // Raw engine stepping: not-initialized and wrong-width classes.
    wm_engine *engine = nullptr;
    REQUIRE(wm_engine_create(corridor2, &cfg, &engine) == WM_OK);
    std::vector<int16_t> block(cfg.parallelism_d, 0);
    std::vector<uint8_t> valid(cfg.parallelism_d, 0);
    int trig = 0;
    CHECK(wm_engine_step(engine, block.data(), cfg.parallelism_d - 1, nullptr, nullptr,
                         nullptr) == WM_ERR_INVALID_ARGUMENT);
    CHECK(wm_engine_step(engine, block.data(), cfg.parallelism_d, block.data(), valid.data(),
                         &trig) == WM_OK);
    CHECK(wm_engine_cycles(engine) == 1);
    CHECK(wm_engine_output_delay(engine) % cfg.parallelism_d == 0);

    const std::string eventsPath = temp_path("events.csv");
    REQUIRE(wm_events_save_csv(events, eventsPath.c_str()) == WM_OK);
    wm_events *eventsBack = nullptr;
    REQUIRE(wm_events_load_csv(eventsPath.c_str(), &eventsBack) == WM_OK);
    CHECK(wm_events_count(eventsBack) == 16);

    wm_events_free(eventsBack);
    wm_engine_free(engine);
    wm_events_free(hits);
    wm_events_free(events);
    wm_waveform_free(waveform);
    wm_interval_template_free(corridor2);
    wm_template_free(reloaded);
    wm_interval_template_free(corridor);
    wm_template_free(strided);
    wm_template_free(averaged);
    wm_locations_free(locations);
    wm_trace_free(seed);
    wm_truth_free(truth);
    wm_trace_free(recording);
    wm_synth_spec_free(spec);
    wm_template_free(pattern);
}

TEST_CASE("calibration failure still reports the best attempt") {
    wm_template *pattern = nullptr;
    REQUIRE(wm_make_smooth_pattern(9, 128, 2000, 8, 16, 128, &pattern) == WM_OK);

    // Recording that is the pattern tiled everywhere: no separation exists.
    std::vector<int16_t> tiled;
    for (int i = 0; i < 40; ++i)
        tiled.insert(tiled.end(), wm_template_samples(pattern),
                     wm_template_samples(pattern) + 128);
    wm_trace *recording = nullptr;
    REQUIRE(wm_trace_create(tiled.data(), tiled.size(), 1.0, 14, &recording) == WM_OK);

    wm_trace *seed = nullptr;
    REQUIRE(wm_trace_create(wm_template_samples(pattern), 128, 1.0, 14, &seed) == WM_OK);
    wm_locations *locations = nullptr;
    wm_locate_params params{};
    wm_locate_params_default(&params);
    REQUIRE(wm_locate_operations(recording, seed, &params, &locations) == WM_OK);
    REQUIRE(wm_locations_count(locations) >= 2);

    wm_interval_template *corridor = nullptr;
    wm_calibration_report report{};
    CHECK(wm_calibrate(recording, locations, pattern, 0, 8, 17, &corridor, &report) ==
          WM_ERR_CALIBRATION_FAILED);
    CHECK(corridor == nullptr);
    CHECK(report.margin <= 0);
    CHECK(std::strlen(wm_last_error()) > 0);

    wm_locations_free(locations);
    wm_trace_free(seed);
    wm_trace_free(recording);
    wm_template_free(pattern);
}
