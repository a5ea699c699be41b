// SPDX-License-Identifier: Apache-2.0
//
// wm — command-line front end for the wavematch shared library.
// Workflow: synth -> locate -> build-template -> calibrate -> match/simulate,
// plus estimate-resources and bench.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavematch/wavematch.h"

namespace {

// Exit codes, one per failure class (documented in the README):
//   0 ok, 2 usage, 3 I/O, 4 parse/format, 5 invalid argument or range,
//   6 undefined correlation, 7 calibration failed, 8 resource check failed,
//   9 internal.
int exit_code_for(wm_status status) {
    switch (status) {
    case WM_OK:
        return 0;
    case WM_ERR_IO:
        return 3;
    case WM_ERR_PARSE:
        return 4;
    case WM_ERR_INVALID_ARGUMENT:
    case WM_ERR_RANGE:
    case WM_ERR_NOT_INITIALIZED:
        return 5;
    case WM_ERR_UNDEFINED_CORRELATION:
        return 6;
    case WM_ERR_CALIBRATION_FAILED:
        return 7;
    case WM_ERR_INTERNAL:
        return 9;
    }
    return 9;
}

struct CliFailure {
    int code;
    std::string message;
};

void check(wm_status status) {
    if (status != WM_OK)
        throw CliFailure{exit_code_for(status), wm_last_error()};
}

[[noreturn]] void fail_usage(const std::string &message) { throw CliFailure{2, message}; }

template <typename T, void (*FreeFn)(T *)> class Handle {
  public:
    Handle() = default;
    ~Handle() { reset(); }
    Handle(const Handle &) = delete;
    Handle &operator=(const Handle &) = delete;

    T **out() {
        reset();
        return &ptr;
    }
    T *get() const { return ptr; }
    operator T *() const { return ptr; }
    void reset() {
        if (ptr) {
            FreeFn(ptr);
            ptr = nullptr;
        }
    }

  private:
    T *ptr = nullptr;
};

using TraceH = Handle<wm_trace, wm_trace_free>;
using TemplateH = Handle<wm_template, wm_template_free>;
using IntervalH = Handle<wm_interval_template, wm_interval_template_free>;
using EventsH = Handle<wm_events, wm_events_free>;
using WaveformH = Handle<wm_waveform, wm_waveform_free>;
using LocationsH = Handle<wm_locations, wm_locations_free>;
using SynthSpecH = Handle<wm_synth_spec, wm_synth_spec_free>;
using TruthH = Handle<wm_truth, wm_truth_free>;

std::string with_commas(std::uint64_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    const std::size_t lead = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && i >= lead && (i - lead) % 3 == 0)
            out += ',';
        out += digits[i];
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/* --------------------------------------------------------------- */
/* Shared option bundles                                            */

struct CorridorArgs {
    std::string template_path;
    std::int64_t offset = -1;
    std::int64_t threshold = -1;

    void add_to(CLI::App *cmd) {
        cmd->add_option("--template", template_path, "Template document (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--offset", offset,
                        "Corridor offset; overrides the stored calibration");
        cmd->add_option("--threshold", threshold,
                        "Match threshold; overrides the stored calibration");
    }

    // Corridor from the stored calibration, or rebuilt from explicit flags.
    void resolve(std::uint32_t precision, TemplateH &tpl, IntervalH &corridor) const {
        check(wm_template_load(template_path.c_str(), tpl.out()));
        if (offset >= 0) {
            check(wm_interval_template_make(tpl, std::uint32_t(offset), precision,
                                            corridor.out()));
            if (threshold >= 0)
                check(wm_interval_template_set_threshold(corridor, std::uint32_t(threshold)));
        } else if (wm_template_has_calibration(tpl)) {
            check(wm_template_interval(tpl, corridor.out()));
            if (threshold >= 0)
                check(wm_interval_template_set_threshold(corridor, std::uint32_t(threshold)));
        } else {
            fail_usage("template '" + template_path +
                       "' carries no calibration; pass --offset (and --threshold)");
        }
    }
};

struct EngineArgs {
    wm_engine_config cfg{};
    CLI::Option *posbufOpt = nullptr;

    void add_to(CLI::App *cmd) {
        wm_engine_config_default(&cfg);
        cmd->add_option("-d,--parallelism", cfg.parallelism_d, "Samples per clock cycle")
            ->capture_default_str();
        cmd->add_option("--latency", cfg.latency_l, "Pipeline latency in cycles")
            ->capture_default_str();
        posbufOpt = cmd->add_option("--positional-buffer", cfg.positional_buffer,
                                    "Pre-template samples to retain (default: template's)");
        cmd->add_option("--holdoff", cfg.holdoff_samples,
                        "Hold-off in samples (0 = one window span)");
        cmd->add_option("--trigger-duration", cfg.trigger_duration_samples,
                        "Trigger pulse width in samples (0 = one window span)");
        cmd->add_option("--idle", cfg.idle_fill, "Fill value for trailing partial blocks");
    }

    wm_engine_config resolved(const wm_template *tpl, std::uint32_t precision) const {
        wm_engine_config out = cfg;
        out.precision_p = precision;
        if (posbufOpt->count() == 0)
            out.positional_buffer = wm_template_positional_buffer(tpl);
        return out;
    }
};

// Decimated trace with event markers, consumed by offline plotting tools.
void write_plot_csv(const wm_trace *stream, const wm_events *events, std::uint32_t decimation,
                    const std::string &path) {
    std::FILE *f = std::fopen(path.c_str(), "w");
    if (!f)
        throw CliFailure{3, "cannot open '" + path + "' for writing"};
    std::fprintf(f, "index,value,event\n");
    const int16_t *samples = wm_trace_samples(stream);
    const std::uint64_t count = wm_trace_count(stream);
    std::uint64_t next = 0;
    const std::uint64_t total = wm_events_count(events);
    for (std::uint64_t i = 0; i < count; i += decimation) {
        wm_match_event e{};
        while (next < total && wm_events_get(events, next, &e) == WM_OK && e.start_index < i)
            ++next;
        bool mark = false;
        if (next < total && wm_events_get(events, next, &e) == WM_OK)
            mark = e.start_index < i + decimation;
        std::fprintf(f, "%" PRIu64 ",%d,%d\n", i, int(samples[i]), mark ? 1 : 0);
    }
    std::fclose(f);
}

/* --------------------------------------------------------------- */
/* Subcommands                                                      */

struct SynthCmd {
    std::string spec_path, out_path, truth_path, spec_out;
    std::int64_t seed = -1;

    void run() const {
        SynthSpecH spec;
        check(wm_synth_spec_load(spec_path.c_str(), spec.out()));
        if (seed >= 0)
            check(wm_synth_spec_set_seed(spec, std::uint64_t(seed)));

        TraceH trace;
        TruthH truth;
        check(wm_synth_generate(spec, trace.out(), truth.out()));
        check(wm_trace_save(trace, out_path.c_str()));
        if (!truth_path.empty())
            check(wm_truth_save_csv(truth, truth_path.c_str()));
        if (!spec_out.empty())
            check(wm_synth_spec_save(spec, spec_out.c_str()));

        std::uint64_t wellFormed = 0;
        for (std::uint64_t i = 0; i < wm_truth_count(truth); ++i)
            wellFormed += wm_truth_well_formed(truth, i) ? 1 : 0;
        std::printf("synth: %s samples, %" PRIu64 " embeddings (%" PRIu64
                    " well-formed) -> %s\n",
                    with_commas(wm_trace_count(trace)).c_str(), wm_truth_count(truth),
                    wellFormed, out_path.c_str());
    }
};

struct LocateCmd {
    std::string trace_path, seed_path, out_path, rejected_path;
    std::uint64_t seed_start = 0;
    std::uint64_t seed_count = 0;
    wm_locate_params params{};

    void run() const {
        TraceH recording, seedFull;
        check(wm_trace_load(trace_path.c_str(), recording.out()));
        check(wm_trace_load(seed_path.c_str(), seedFull.out()));

        TraceH seedSlice;
        const wm_trace *seed = seedFull.get();
        if (seed_count > 0) {
            check(wm_trace_slice(seedFull, seed_start, seed_count, seedSlice.out()));
            seed = seedSlice.get();
        }

        LocationsH locations;
        check(wm_locate_operations(recording, seed, &params, locations.out()));
        check(wm_locations_save_csv(locations, out_path.c_str()));
        if (!rejected_path.empty())
            check(wm_locations_rejected_save_csv(locations, rejected_path.c_str()));

        std::printf("locate: %" PRIu64 " operations (span %" PRIu64 "), %" PRIu64
                    " rejected -> %s\n",
                    wm_locations_count(locations), wm_locations_span(locations),
                    wm_locations_rejected_count(locations), out_path.c_str());
        for (std::uint64_t i = 0; i < wm_locations_rejected_count(locations); ++i) {
            std::uint64_t idx = 0;
            const char *reason = nullptr;
            check(wm_locations_rejected_get(locations, i, &idx, &reason));
            std::printf("  rejected @%" PRIu64 ": %s\n", idx, reason);
        }
    }
};

struct BuildTemplateCmd {
    std::string trace_path, locations_path, out_path;
    std::uint64_t length = 0;
    std::uint32_t stride = 1;
    std::uint32_t positional_buffer = 0;

    void run() const {
        TraceH recording;
        LocationsH locations;
        check(wm_trace_load(trace_path.c_str(), recording.out()));
        check(wm_locations_load_csv(locations_path.c_str(), locations.out()));

        TemplateH averaged;
        check(wm_build_template(recording, locations, length, positional_buffer,
                                averaged.out()));
        TemplateH result;
        check(wm_template_subsample(averaged, stride, result.out()));
        check(wm_template_save(result, out_path.c_str()));

        std::printf("build-template: averaged %" PRIu64 " windows into %" PRIu64
                    " samples (stride %u, %" PRIu64 " compared) -> %s\n",
                    wm_locations_count(locations), wm_template_length(result), stride,
                    wm_template_compared_positions(result), out_path.c_str());
    }
};

struct CalibrateCmd {
    std::string trace_path, locations_path, template_path, out_path;
    std::uint32_t offset_min = 0;
    std::uint32_t offset_max = 64;
    std::uint32_t background_step = 17;

    void run() const {
        TraceH recording;
        LocationsH locations;
        TemplateH tpl;
        check(wm_trace_load(trace_path.c_str(), recording.out()));
        check(wm_locations_load_csv(locations_path.c_str(), locations.out()));
        check(wm_template_load(template_path.c_str(), tpl.out()));

        IntervalH corridor;
        wm_calibration_report report{};
        const wm_status status = wm_calibrate(recording, locations, tpl, offset_min,
                                              offset_max, background_step, corridor.out(),
                                              &report);
        std::printf("calibration: offset=%u threshold=%u true_min=%" PRId64
                    " background_max=%" PRId64 " margin=%" PRId64 "%s\n",
                    report.chosen_offset, report.chosen_threshold, report.true_score_min,
                    report.background_score_max, report.margin,
                    status == WM_OK ? "" : " (FAILED)");
        check(status);

        check(wm_template_attach_calibration(tpl, corridor, &report));
        check(wm_template_save(tpl, out_path.c_str()));
        std::printf("calibrate: corridor with %" PRIu64 " positions -> %s\n",
                    wm_interval_template_size(corridor), out_path.c_str());
    }
};

struct MatchCmd {
    std::string trace_path, out_path, plot_path;
    CorridorArgs corridor_args;
    std::uint32_t plot_decimation = 1000;

    void run() const {
        TraceH stream;
        check(wm_trace_load(trace_path.c_str(), stream.out()));
        TemplateH tpl;
        IntervalH corridor;
        corridor_args.resolve(wm_trace_precision(stream), tpl, corridor);

        EventsH events;
        check(wm_batch_match(stream, corridor, events.out()));
        check(wm_events_save_csv(events, out_path.c_str()));
        std::printf("match: %" PRIu64 " windows at or above threshold %u -> %s\n",
                    wm_events_count(events), wm_interval_template_threshold(corridor),
                    out_path.c_str());
        if (!plot_path.empty())
            write_plot_csv(stream, events, plot_decimation, plot_path);
    }
};

struct SimulateCmd {
    std::string trace_path, events_path, waveform_path, plot_path;
    CorridorArgs corridor_args;
    EngineArgs engine_args;
    std::uint32_t plot_decimation = 1000;

    void run() const {
        TraceH stream;
        check(wm_trace_load(trace_path.c_str(), stream.out()));
        TemplateH tpl;
        IntervalH corridor;
        corridor_args.resolve(wm_trace_precision(stream), tpl, corridor);
        const wm_engine_config cfg = engine_args.resolved(tpl, wm_trace_precision(stream));

        EventsH events;
        WaveformH waveform;
        check(wm_run_engine(stream, corridor, &cfg, events.out(), waveform.out()));
        check(wm_events_save_csv(events, events_path.c_str()));
        if (!waveform_path.empty())
            check(wm_waveform_save_csv(waveform, waveform_path.c_str()));

        std::uint64_t pulses = 0;
        const std::uint8_t *bits = wm_waveform_bits(waveform);
        for (std::uint64_t i = 0; i < wm_waveform_length(waveform); ++i)
            pulses += (bits[i] == 1 && (i == 0 || bits[i - 1] == 0)) ? 1 : 0;

        std::printf("simulate: d=%u, %" PRIu64 " events, %" PRIu64 " trigger pulses -> %s\n",
                    cfg.parallelism_d, wm_events_count(events), pulses, events_path.c_str());
        if (!plot_path.empty())
            write_plot_csv(stream, events, plot_decimation, plot_path);
    }
};

struct EstimateCmd {
    std::uint64_t samples = 0;
    std::string adder = "lut";
    std::uint32_t parallelism = 32;
    std::string device_path;
    bool max_length = false;
    double reserve = 0.32;
    bool require_fit = false;

    void run() const {
        wm_device_profile device{};
        if (device_path.empty())
            wm_device_kintex_ku85(&device);
        else
            check(wm_device_load(device_path.c_str(), &device));
        const wm_adder_style style =
            adder == "carry" ? WM_ADDER_CARRY_LOGIC : WM_ADDER_LUT_BASED;

        wm_resource_estimate est{};
        check(wm_estimate_luts(samples, style, parallelism, &device, &est));
        std::printf("%s samples, %s adders, d=%u: %s LUTs, %.0f%% of %s (%s)\n",
                    with_commas(samples).c_str(), adder.c_str(), parallelism,
                    with_commas(est.luts).c_str(), est.utilization_fraction * 100.0,
                    device.name, est.fits ? "fits" : "does not fit");

        if (max_length) {
            std::uint64_t n = 0;
            check(wm_max_template_length(&device, style, parallelism, reserve, &n));
            std::printf("max template length at %.0f%% reserve: %s samples\n",
                        reserve * 100.0, with_commas(n).c_str());
        }
        if (require_fit && !est.fits)
            throw CliFailure{8, "design does not fit: " + with_commas(est.luts) + " LUTs > " +
                                    with_commas(device.lut_capacity)};
    }
};

struct BenchCmd {
    std::uint64_t samples = 10'000'000;
    std::uint64_t template_length = 1400;
    std::uint32_t stride = 4;
    std::uint32_t offset = 16;
    double threshold_fraction = 0.9;
    std::uint64_t seed = 42;
    std::int32_t noise = 200;
    bool engine = false;
    std::uint32_t parallelism = 32;
    std::uint32_t latency = 4;

    void run() const {
        TemplateH pattern;
        check(wm_make_smooth_pattern(seed, template_length, 3000, 8, 16, 256, pattern.out()));
        TemplateH strided;
        check(wm_template_subsample(pattern, stride, strided.out()));

        SynthSpecH spec;
        check(wm_synth_spec_create(samples, seed, spec.out()));
        check(wm_synth_spec_set_background(spec, "uniform", noise));
        check(wm_synth_spec_add_pattern(spec, "op", pattern));
        const std::uint64_t spacing = samples / 16;
        for (std::uint64_t i = 0; i < 15 && spacing > template_length; ++i)
            check(wm_synth_spec_add_embedding(spec, "op", spacing / 2 + i * spacing, 0,
                                              std::int32_t(offset) / 2, 0));
        TraceH stream;
        check(wm_synth_generate(spec, stream.out(), nullptr));

        IntervalH corridor;
        check(wm_interval_template_make(strided, offset, 14, corridor.out()));
        const std::uint64_t m = wm_interval_template_size(corridor);
        check(wm_interval_template_set_threshold(
            corridor, std::uint32_t(double(m) * threshold_fraction)));

        const auto t0 = std::chrono::steady_clock::now();
        EventsH hits;
        check(wm_batch_match(stream, corridor, hits.out()));
        const double batchSec = seconds_since(t0);
        std::printf("batch_match: %s samples, m=%" PRIu64 ", hits=%" PRIu64
                    ", %.3f s, %.0f samples/s\n",
                    with_commas(samples).c_str(), m, wm_events_count(hits), batchSec,
                    double(samples) / batchSec);

        if (engine) {
            wm_engine_config cfg;
            wm_engine_config_default(&cfg);
            cfg.parallelism_d = parallelism;
            cfg.latency_l = latency;
            const std::uint64_t srg = wm_compute_srg_length(
                template_length, wm_compute_excess_samples(latency, parallelism, 0));
            const std::uint64_t stages = (srg + parallelism - 1) / parallelism;
            const std::uint64_t cycles = (samples + parallelism - 1) / parallelism + stages - 1;

            const auto t1 = std::chrono::steady_clock::now();
            EventsH events;
            check(wm_run_engine(stream, corridor, &cfg, events.out(), nullptr));
            const double engineSec = seconds_since(t1);
            std::printf("engine: %s cycles simulated, d=%u, %" PRIu64
                        " events, %.3f s, %.0f samples/s\n",
                        with_commas(cycles).c_str(), parallelism, wm_events_count(events),
                        engineSec, double(samples) / engineSec);
        }
    }
};

} // namespace

int main(int argc, char **argv) {
    CLI::App app{
        "wavematch: block-parallel waveform matching over sampled side-channel streams"};
    app.set_version_flag("--version", std::string("wavematch ") + wm_version());
    app.set_config("--config", "", "Read option defaults from an INI/TOML file");
    bool printConfig = false;
    app.add_flag("--print-config", printConfig,
                 "Print the effective configuration (flags > config file > defaults)");
    app.require_subcommand(0, 1);

    SynthCmd synth;
    auto *synthCmd = app.add_subcommand("synth", "Generate a synthetic trace from a spec");
    synthCmd->add_option("--spec", synth.spec_path, "Synthesis spec (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    synthCmd->add_option("--out", synth.out_path, "Output trace (WMTR)")->required();
    synthCmd->add_option("--truth", synth.truth_path, "Ground-truth CSV");
    synthCmd->add_option("--seed", synth.seed, "Override the spec's seed");
    synthCmd->add_option("--spec-out", synth.spec_out, "Write the canonical expanded spec");

    LocateCmd locate;
    wm_locate_params_default(&locate.params);
    auto *locateCmd =
        app.add_subcommand("locate", "Find operations in a recording via correlation");
    locateCmd->add_option("--trace", locate.trace_path, "Recording (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    locateCmd->add_option("--seed-trace", locate.seed_path, "Seed segment trace (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    locateCmd->add_option("--seed-start", locate.seed_start, "Slice start in the seed trace");
    locateCmd->add_option("--seed-count", locate.seed_count,
                          "Slice length (0 = whole seed trace)");
    locateCmd->add_option("--threshold", locate.params.correlation_threshold,
                          "Correlation threshold")
        ->capture_default_str();
    locateCmd->add_option("--coarse-step", locate.params.coarse_step, "Coarse scan step")
        ->capture_default_str();
    locateCmd->add_option("--reject-floor", locate.params.reject_floor,
                          "Report slots above this correlation as rejected")
        ->capture_default_str();
    locateCmd->add_option("--expected", locate.params.expected_count,
                          "Expected number of operations (-1 = unknown)");
    locateCmd->add_option("--out", locate.out_path, "Locations CSV")->required();
    locateCmd->add_option("--rejected-out", locate.rejected_path, "Rejected-candidates CSV");

    BuildTemplateCmd build;
    auto *buildCmd =
        app.add_subcommand("build-template", "Average located windows into a template");
    buildCmd->add_option("--trace", build.trace_path, "Recording (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    buildCmd->add_option("--locations", build.locations_path, "Locations CSV")
        ->required()
        ->check(CLI::ExistingFile);
    buildCmd->add_option("--length", build.length, "Template length in samples")->required();
    buildCmd->add_option("--stride", build.stride, "Comparison stride")->capture_default_str();
    buildCmd->add_option("--positional-buffer", build.positional_buffer,
                         "Pre-template samples to retain");
    buildCmd->add_option("--out", build.out_path, "Template document (JSON)")->required();

    CalibrateCmd calibrate;
    auto *calibrateCmd =
        app.add_subcommand("calibrate", "Sweep corridor offsets and pick the threshold");
    calibrateCmd->add_option("--trace", calibrate.trace_path, "Recording (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    calibrateCmd->add_option("--locations", calibrate.locations_path, "Locations CSV")
        ->required()
        ->check(CLI::ExistingFile);
    calibrateCmd->add_option("--template", calibrate.template_path, "Template document")
        ->required()
        ->check(CLI::ExistingFile);
    calibrateCmd->add_option("--offset-min", calibrate.offset_min, "Smallest offset")
        ->capture_default_str();
    calibrateCmd->add_option("--offset-max", calibrate.offset_max, "Largest offset")
        ->capture_default_str();
    calibrateCmd->add_option("--background-step", calibrate.background_step,
                             "Stride between background windows")
        ->capture_default_str();
    calibrateCmd->add_option("--out", calibrate.out_path, "Calibrated template (JSON)")
        ->required();

    MatchCmd match;
    auto *matchCmd = app.add_subcommand("match", "Batch-match a trace against a corridor");
    matchCmd->add_option("--trace", match.trace_path, "Stream (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    match.corridor_args.add_to(matchCmd);
    matchCmd->add_option("--out", match.out_path, "Event log CSV")->required();
    matchCmd->add_option("--plot-csv", match.plot_path, "Decimated plot CSV");
    matchCmd->add_option("--plot-decimation", match.plot_decimation, "Plot decimation")
        ->capture_default_str();

    SimulateCmd simulate;
    auto *simulateCmd =
        app.add_subcommand("simulate", "Run the cycle-accurate engine over a trace");
    simulateCmd->add_option("--trace", simulate.trace_path, "Stream (WMTR)")
        ->required()
        ->check(CLI::ExistingFile);
    simulate.corridor_args.add_to(simulateCmd);
    simulate.engine_args.add_to(simulateCmd);
    simulateCmd->add_option("--events", simulate.events_path, "Event log CSV")->required();
    simulateCmd->add_option("--waveform", simulate.waveform_path,
                            "Trigger waveform CSV (run-length pulses)");
    simulateCmd->add_option("--plot-csv", simulate.plot_path, "Decimated plot CSV");
    simulateCmd->add_option("--plot-decimation", simulate.plot_decimation, "Plot decimation")
        ->capture_default_str();

    EstimateCmd estimate;
    auto *estimateCmd =
        app.add_subcommand("estimate-resources", "Predict FPGA LUT usage of the matcher");
    estimateCmd->add_option("--samples", estimate.samples, "Compared template samples")
        ->required();
    estimateCmd->add_option("--adder", estimate.adder, "Adder style: lut or carry")
        ->check(CLI::IsMember({"lut", "carry"}))
        ->capture_default_str();
    estimateCmd->add_option("--parallelism", estimate.parallelism, "Samples per cycle")
        ->capture_default_str();
    estimateCmd->add_option("--device", estimate.device_path, "Device profile (JSON)")
        ->check(CLI::ExistingFile);
    estimateCmd->add_flag("--max-length", estimate.max_length,
                          "Also report the largest template that fits");
    estimateCmd->add_option("--reserve", estimate.reserve,
                            "Fabric fraction reserved for other logic")
        ->capture_default_str();
    estimateCmd->add_flag("--require-fit", estimate.require_fit,
                          "Exit nonzero when the design does not fit");

    BenchCmd bench;
    auto *benchCmd = app.add_subcommand("bench", "Measure matcher throughput");
    benchCmd->add_option("--samples", bench.samples, "Stream length")->capture_default_str();
    benchCmd->add_option("--template-length", bench.template_length, "Template length")
        ->capture_default_str();
    benchCmd->add_option("--stride", bench.stride, "Comparison stride")->capture_default_str();
    benchCmd->add_option("--offset", bench.offset, "Corridor offset")->capture_default_str();
    benchCmd->add_option("--threshold-fraction", bench.threshold_fraction,
                         "Threshold as a fraction of the compared positions")
        ->capture_default_str();
    benchCmd->add_option("--seed", bench.seed, "Stream seed")->capture_default_str();
    benchCmd->add_option("--noise", bench.noise, "Background noise amplitude")
        ->capture_default_str();
    benchCmd->add_flag("--engine", bench.engine, "Also time the cycle-accurate engine");
    benchCmd->add_option("-d,--parallelism", bench.parallelism, "Engine parallelism")
        ->capture_default_str();
    benchCmd->add_option("--latency", bench.latency, "Engine latency")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        // Map every parse/usage failure onto exit code 2; --help and
        // --version exit 0 through the same path.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (printConfig) {
        std::cout << app.config_to_str(true, true);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (synthCmd->parsed())
            synth.run();
        else if (locateCmd->parsed())
            locate.run();
        else if (buildCmd->parsed())
            build.run();
        else if (calibrateCmd->parsed())
            calibrate.run();
        else if (matchCmd->parsed())
            match.run();
        else if (simulateCmd->parsed())
            simulate.run();
        else if (estimateCmd->parsed())
            estimate.run();
        else if (benchCmd->parsed())
            bench.run();
    } catch (const CliFailure &f) {
        std::cerr << "wm: " << f.message << "\n";
        return f.code;
    }
    return 0;
}
