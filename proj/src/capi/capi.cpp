// SPDX-License-Identifier: Apache-2.0
#include "wavematch/wavematch.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "core/calibration.hpp"
#include "core/engine.hpp"
#include "core/io.hpp"
#include "core/resource_model.hpp"
#include "core/similarity.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

struct wm_trace {
    wm::Trace v;
    std::uint32_t precision = wm::kDefaultPrecision;
};
struct wm_template {
    wm::StoredTemplate v;
};
struct wm_interval_template {
    wm::IntervalTemplate v;
};
struct wm_engine {
    wm::Engine v;
};
struct wm_events {
    std::vector<wm::MatchEvent> v;
};
struct wm_waveform {
    std::vector<std::uint8_t> v;
};
struct wm_locations {
    wm::LocatedOperations v;
};
struct wm_synth_spec {
    wm::SynthSpecFile v;
};
struct wm_truth {
    std::vector<wm::GroundTruthEntry> v;
};

namespace {

thread_local std::string tl_error;

wm_status map_kind(wm::ErrorKind kind) {
    switch (kind) {
    case wm::ErrorKind::invalid_argument:
        return WM_ERR_INVALID_ARGUMENT;
    case wm::ErrorKind::range:
        return WM_ERR_RANGE;
    case wm::ErrorKind::io:
        return WM_ERR_IO;
    case wm::ErrorKind::parse:
        return WM_ERR_PARSE;
    case wm::ErrorKind::undefined_correlation:
        return WM_ERR_UNDEFINED_CORRELATION;
    case wm::ErrorKind::calibration_failed:
        return WM_ERR_CALIBRATION_FAILED;
    case wm::ErrorKind::not_initialized:
        return WM_ERR_NOT_INITIALIZED;
    case wm::ErrorKind::internal:
        return WM_ERR_INTERNAL;
    }
    return WM_ERR_INTERNAL;
}

template <typename Fn> wm_status guarded(Fn &&fn) noexcept {
    try {
        fn();
        return WM_OK;
    } catch (const wm::Error &e) {
        tl_error = e.what();
        return map_kind(e.kind());
    } catch (const std::exception &e) {
        tl_error = e.what();
        return WM_ERR_INTERNAL;
    } catch (...) {
        tl_error = "unknown failure";
        return WM_ERR_INTERNAL;
    }
}

wm_status fail(wm_status status, const std::string &message) {
    tl_error = message;
    return status;
}

wm_status require_handle(const void *p, const char *name) {
    if (p)
        return WM_OK;
    return fail(WM_ERR_INVALID_ARGUMENT, std::string("null handle: ") + name);
}

wm_match_event to_c(const wm::MatchEvent &e) {
    return {e.start_index, e.lane, e.score, e.trigger_index};
}

wm_calibration_report to_c(const wm::CalibrationReport &r) {
    return {r.chosen_offset, r.chosen_threshold, r.true_score_min, r.background_score_max,
            r.margin};
}

wm::CalibrationReport from_c(const wm_calibration_report &r) {
    return {r.chosen_offset, r.chosen_threshold, r.true_score_min, r.background_score_max,
            r.margin};
}

wm::EngineConfig from_c(const wm_engine_config *cfg) {
    if (!cfg)
        return {};
    wm::EngineConfig out;
    out.parallelism_d = cfg->parallelism_d;
    out.precision_p = cfg->precision_p;
    out.latency_l = cfg->latency_l;
    out.positional_buffer = cfg->positional_buffer;
    out.holdoff_samples = cfg->holdoff_samples;
    out.trigger_duration_samples = cfg->trigger_duration_samples;
    out.idle_fill = cfg->idle_fill;
    return out;
}

wm::AdderStyle from_c(wm_adder_style style) {
    return style == WM_ADDER_LUT_BASED ? wm::AdderStyle::lut_based : wm::AdderStyle::carry_logic;
}

void to_c(const wm::DeviceProfile &device, wm_device_profile *out) {
    std::snprintf(out->name, sizeof(out->name), "%s", device.name.c_str());
    out->lut_capacity = device.lut_capacity;
}

wm::DeviceProfile from_c(const wm_device_profile *device) {
    if (!device)
        return wm::kintex_ku85();
    return {device->name, device->lut_capacity};
}

} // namespace

extern "C" {

const char *wm_version(void) { return "1.0.0"; }

const char *wm_last_error(void) { return tl_error.c_str(); }

void wm_engine_config_default(wm_engine_config *cfg) {
    if (!cfg)
        return;
    const wm::EngineConfig def;
    *cfg = {def.parallelism_d,    def.precision_p,
            def.latency_l,       def.positional_buffer,
            def.holdoff_samples, def.trigger_duration_samples,
            def.idle_fill};
}

void wm_locate_params_default(wm_locate_params *params) {
    if (!params)
        return;
    const wm::LocatorParams def;
    *params = {def.correlation_threshold, def.coarse_step, def.reject_floor, -1};
}

/* ------------------------------------------------------------------ */
/* Traces                                                              */

wm_status wm_trace_create(const int16_t *samples, uint64_t count, double sample_rate_hz,
                          uint32_t precision_p, wm_trace **out) {
    if (!out || (!samples && count > 0))
        return fail(WM_ERR_INVALID_ARGUMENT, "null samples/out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_trace>();
        handle->v.samples.assign(samples, samples + count);
        handle->v.sample_rate_hz = sample_rate_hz;
        handle->precision = precision_p;
        wm::validate_trace(handle->v, precision_p);
        *out = handle.release();
    });
}

wm_status wm_trace_load(const char *path, wm_trace **out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_trace>();
        handle->precision = wm::trace_file_precision(path);
        handle->v = wm::load_trace(path);
        *out = handle.release();
    });
}

wm_status wm_trace_save(const wm_trace *trace, const char *path) {
    if (wm_status s = require_handle(trace, "trace"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_trace(trace->v, path, trace->precision); });
}

wm_status wm_trace_slice(const wm_trace *trace, uint64_t start, uint64_t count,
                         wm_trace **out) {
    if (wm_status s = require_handle(trace, "trace"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        if (start + count > trace->v.size())
            wm::raise(wm::ErrorKind::invalid_argument, "slice exceeds the trace");
        auto handle = std::make_unique<wm_trace>();
        handle->precision = trace->precision;
        handle->v.sample_rate_hz = trace->v.sample_rate_hz;
        handle->v.label = trace->v.label;
        handle->v.samples.assign(trace->v.samples.begin() + std::ptrdiff_t(start),
                                 trace->v.samples.begin() + std::ptrdiff_t(start + count));
        *out = handle.release();
    });
}

uint64_t wm_trace_count(const wm_trace *trace) { return trace ? trace->v.size() : 0; }

const int16_t *wm_trace_samples(const wm_trace *trace) {
    return trace ? trace->v.samples.data() : nullptr;
}

double wm_trace_sample_rate(const wm_trace *trace) {
    return trace ? trace->v.sample_rate_hz : 0.0;
}

uint32_t wm_trace_precision(const wm_trace *trace) { return trace ? trace->precision : 0; }

void wm_trace_free(wm_trace *trace) { delete trace; }

/* ------------------------------------------------------------------ */
/* Templates and corridors                                             */

wm_status wm_template_create(const int16_t *samples, uint64_t count, uint32_t stride,
                             uint32_t positional_buffer, wm_template **out) {
    if (!out || !samples)
        return fail(WM_ERR_INVALID_ARGUMENT, "null samples/out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_template>();
        handle->v.tpl.samples.assign(samples, samples + count);
        handle->v.tpl.stride = stride;
        handle->v.tpl.positional_buffer = positional_buffer;
        wm::validate_template(handle->v.tpl, wm::kMaxPrecision);
        *out = handle.release();
    });
}

wm_status wm_template_load(const char *path, wm_template **out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_template>();
        handle->v = wm::load_template(path);
        *out = handle.release();
    });
}

wm_status wm_template_save(const wm_template *tpl, const char *path) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_template(tpl->v, path); });
}

wm_status wm_template_subsample(const wm_template *tpl, uint32_t stride, wm_template **out) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_template>();
        handle->v.tpl = wm::subsample_template(tpl->v.tpl, stride);
        *out = handle.release();
    });
}

uint64_t wm_template_length(const wm_template *tpl) { return tpl ? tpl->v.tpl.length() : 0; }

const int16_t *wm_template_samples(const wm_template *tpl) {
    return tpl ? tpl->v.tpl.samples.data() : nullptr;
}

uint32_t wm_template_stride(const wm_template *tpl) { return tpl ? tpl->v.tpl.stride : 0; }

uint32_t wm_template_positional_buffer(const wm_template *tpl) {
    return tpl ? tpl->v.tpl.positional_buffer : 0;
}

uint64_t wm_template_compared_positions(const wm_template *tpl) {
    return tpl ? tpl->v.tpl.compared_positions() : 0;
}

int wm_template_has_calibration(const wm_template *tpl) {
    return tpl && tpl->v.calibration ? 1 : 0;
}

wm_status wm_template_interval(const wm_template *tpl, wm_interval_template **out) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    if (!tpl->v.calibration)
        return fail(WM_ERR_NOT_INITIALIZED, "template carries no calibration");
    return guarded([&] { *out = new wm_interval_template{tpl->v.calibration->first}; });
}

wm_status wm_template_calibration_report(const wm_template *tpl, wm_calibration_report *out) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    if (!tpl->v.calibration)
        return fail(WM_ERR_NOT_INITIALIZED, "template carries no calibration");
    *out = to_c(tpl->v.calibration->second);
    return WM_OK;
}

wm_status wm_template_attach_calibration(wm_template *tpl, const wm_interval_template *it,
                                         const wm_calibration_report *report) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!it || !report)
        return fail(WM_ERR_INVALID_ARGUMENT, "null interval template/report");
    return guarded([&] { tpl->v.calibration = {{it->v, from_c(*report)}}; });
}

void wm_template_free(wm_template *tpl) { delete tpl; }

wm_status wm_interval_template_make(const wm_template *tpl, uint32_t offset,
                                    uint32_t precision_p, wm_interval_template **out) {
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        *out = new wm_interval_template{
            wm::make_interval_template(tpl->v.tpl, offset, precision_p)};
    });
}

wm_status wm_interval_template_set_threshold(wm_interval_template *it, uint32_t threshold) {
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    return guarded([&] { it->v.set_threshold(threshold); });
}

uint64_t wm_interval_template_size(const wm_interval_template *it) {
    return it ? it->v.size() : 0;
}

const int16_t *wm_interval_template_upper(const wm_interval_template *it) {
    return it ? it->v.upper.data() : nullptr;
}

const int16_t *wm_interval_template_lower(const wm_interval_template *it) {
    return it ? it->v.lower.data() : nullptr;
}

uint32_t wm_interval_template_threshold(const wm_interval_template *it) {
    return it ? it->v.threshold : 0;
}

uint32_t wm_interval_template_stride(const wm_interval_template *it) {
    return it ? it->v.source_stride : 0;
}

uint64_t wm_interval_template_window_span(const wm_interval_template *it) {
    return it ? it->v.window_span() : 0;
}

void wm_interval_template_free(wm_interval_template *it) { delete it; }

/* ------------------------------------------------------------------ */
/* Similarity                                                          */

wm_status wm_pearson_correlation(const int16_t *t, const int16_t *c, uint64_t n, double *out) {
    if (!t || !c || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = wm::pearson_correlation({t, n}, {c, n}); });
}

wm_status wm_sad(const int16_t *t, const int16_t *c, uint64_t n, uint64_t *out) {
    if (!t || !c || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = wm::sad({t, n}, {c, n}); });
}

int wm_interval_indicator(int16_t sample, int16_t upper, int16_t lower) {
    return wm::interval_indicator(sample, upper, lower) ? 1 : 0;
}

wm_status wm_interval_score(const int16_t *segment, uint64_t length,
                            const wm_interval_template *it, uint32_t *out) {
    if (!segment || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null argument");
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    return guarded([&] { *out = wm::interval_score({segment, length}, it->v); });
}

/* ------------------------------------------------------------------ */
/* Engine                                                              */

uint64_t wm_compute_excess_samples(uint32_t latency_l, uint32_t parallelism_d,
                                   uint32_t positional_buffer) {
    return wm::compute_excess_samples(latency_l, parallelism_d, positional_buffer);
}

uint64_t wm_compute_srg_length(uint64_t template_length_n, uint64_t excess) {
    return wm::compute_srg_length(template_length_n, excess);
}

wm_status wm_engine_create(const wm_interval_template *it, const wm_engine_config *cfg,
                           wm_engine **out) {
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] { *out = new wm_engine{wm::Engine(it->v, from_c(cfg))}; });
}

wm_status wm_engine_step(wm_engine *engine, const int16_t *block, uint32_t block_len,
                         int16_t *output, uint8_t *valid, int *trigger) {
    if (!engine)
        return fail(WM_ERR_NOT_INITIALIZED, "engine handle not initialized");
    if (!block)
        return fail(WM_ERR_INVALID_ARGUMENT, "null block");
    return guarded([&] {
        const wm::StepResult res = engine->v.step({block, block_len});
        if (output)
            std::memcpy(output, res.output.data(), res.output.size() * sizeof(int16_t));
        if (valid)
            std::memcpy(valid, res.valid.data(), res.valid.size());
        if (trigger)
            *trigger = res.trigger ? 1 : 0;
    });
}

wm_status wm_engine_limit_valid(wm_engine *engine, uint64_t last_valid_start) {
    if (!engine)
        return fail(WM_ERR_NOT_INITIALIZED, "engine handle not initialized");
    engine->v.limit_valid_windows(last_valid_start);
    return WM_OK;
}

uint64_t wm_engine_output_delay(const wm_engine *engine) {
    return engine ? engine->v.output_delay_samples() : 0;
}

uint64_t wm_engine_cycles(const wm_engine *engine) { return engine ? engine->v.cycles() : 0; }

wm_status wm_engine_events(const wm_engine *engine, wm_events **out) {
    if (!engine)
        return fail(WM_ERR_NOT_INITIALIZED, "engine handle not initialized");
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] { *out = new wm_events{engine->v.events()}; });
}

void wm_engine_free(wm_engine *engine) { delete engine; }

wm_status wm_run_engine(const wm_trace *stream, const wm_interval_template *it,
                        const wm_engine_config *cfg, wm_events **events,
                        wm_waveform **waveform) {
    if (wm_status s = require_handle(stream, "trace"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    return guarded([&] {
        wm::EngineRun run = wm::run_engine(stream->v, it->v, from_c(cfg));
        if (events)
            *events = new wm_events{std::move(run.events)};
        if (waveform)
            *waveform = new wm_waveform{std::move(run.trigger_waveform)};
    });
}

wm_status wm_batch_match(const wm_trace *stream, const wm_interval_template *it,
                         wm_events **out) {
    if (wm_status s = require_handle(stream, "trace"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        const auto hits = wm::batch_match(stream->v, it->v);
        auto handle = std::make_unique<wm_events>();
        handle->v.reserve(hits.size());
        for (const auto &h : hits)
            handle->v.push_back({h.start_index, 0, h.score, h.start_index});
        *out = handle.release();
    });
}

wm_status wm_scalar_reference_match(const wm_trace *stream, const wm_interval_template *it,
                                    const wm_engine_config *cfg, wm_events **out) {
    if (wm_status s = require_handle(stream, "trace"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(it, "interval template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded(
        [&] { *out = new wm_events{wm::scalar_reference_match(stream->v, it->v, from_c(cfg))}; });
}

uint64_t wm_events_count(const wm_events *events) { return events ? events->v.size() : 0; }

wm_status wm_events_get(const wm_events *events, uint64_t index, wm_match_event *out) {
    if (wm_status s = require_handle(events, "events"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    if (index >= events->v.size())
        return fail(WM_ERR_INVALID_ARGUMENT, "event index out of range");
    *out = to_c(events->v[index]);
    return WM_OK;
}

wm_status wm_events_save_csv(const wm_events *events, const char *path) {
    if (wm_status s = require_handle(events, "events"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_events_csv(events->v, path); });
}

wm_status wm_events_load_csv(const char *path, wm_events **out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    *out = nullptr;
    return guarded([&] { *out = new wm_events{wm::load_events_csv(path)}; });
}

void wm_events_free(wm_events *events) { delete events; }

uint64_t wm_waveform_length(const wm_waveform *waveform) {
    return waveform ? waveform->v.size() : 0;
}

const uint8_t *wm_waveform_bits(const wm_waveform *waveform) {
    return waveform ? waveform->v.data() : nullptr;
}

wm_status wm_waveform_save_csv(const wm_waveform *waveform, const char *path) {
    if (wm_status s = require_handle(waveform, "waveform"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_waveform_csv(waveform->v, path); });
}

void wm_waveform_free(wm_waveform *waveform) { delete waveform; }

/* ------------------------------------------------------------------ */
/* Calibration workflow                                                */

wm_status wm_locate_operations(const wm_trace *recording, const wm_trace *seed_segment,
                               const wm_locate_params *params, wm_locations **out) {
    if (wm_status s = require_handle(recording, "recording"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(seed_segment, "seed segment"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        wm::LocatorParams p;
        if (params) {
            p.correlation_threshold = params->correlation_threshold;
            p.coarse_step = params->coarse_step;
            p.reject_floor = params->reject_floor;
            if (params->expected_count >= 0)
                p.expected_count = std::uint64_t(params->expected_count);
        }
        *out = new wm_locations{wm::locate_operations(recording->v, seed_segment->v, p)};
    });
}

uint64_t wm_locations_count(const wm_locations *locations) {
    return locations ? locations->v.locations.size() : 0;
}

uint64_t wm_locations_get(const wm_locations *locations, uint64_t index) {
    if (!locations || index >= locations->v.locations.size())
        return 0;
    return locations->v.locations[index];
}

uint64_t wm_locations_span(const wm_locations *locations) {
    return locations ? locations->v.span : 0;
}

uint64_t wm_locations_rejected_count(const wm_locations *locations) {
    return locations ? locations->v.rejected.size() : 0;
}

wm_status wm_locations_rejected_get(const wm_locations *locations, uint64_t index,
                                    uint64_t *rejected_index, const char **reason) {
    if (wm_status s = require_handle(locations, "locations"); s != WM_OK)
        return s;
    if (index >= locations->v.rejected.size())
        return fail(WM_ERR_INVALID_ARGUMENT, "rejected index out of range");
    if (rejected_index)
        *rejected_index = locations->v.rejected[index].index;
    if (reason)
        *reason = locations->v.rejected[index].reason.c_str();
    return WM_OK;
}

wm_status wm_locations_save_csv(const wm_locations *locations, const char *path) {
    if (wm_status s = require_handle(locations, "locations"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_locations_csv(locations->v, path); });
}

wm_status wm_locations_rejected_save_csv(const wm_locations *locations, const char *path) {
    if (wm_status s = require_handle(locations, "locations"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_rejected_csv(locations->v, path); });
}

wm_status wm_locations_load_csv(const char *path, wm_locations **out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    *out = nullptr;
    return guarded([&] { *out = new wm_locations{wm::load_locations_csv(path)}; });
}

void wm_locations_free(wm_locations *locations) { delete locations; }

wm_status wm_build_template(const wm_trace *recording, const wm_locations *locations,
                            uint64_t length_n, uint32_t positional_buffer, wm_template **out) {
    if (wm_status s = require_handle(recording, "recording"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(locations, "locations"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_template>();
        handle->v.tpl =
            wm::build_template(recording->v, locations->v, length_n, positional_buffer);
        *out = handle.release();
    });
}

wm_status wm_calibrate(const wm_trace *recording, const wm_locations *locations,
                       const wm_template *tpl, uint32_t offset_min, uint32_t offset_max,
                       uint32_t background_step, wm_interval_template **out,
                       wm_calibration_report *report) {
    if (wm_status s = require_handle(recording, "recording"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(locations, "locations"); s != WM_OK)
        return s;
    if (wm_status s = require_handle(tpl, "template"); s != WM_OK)
        return s;
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    try {
        wm::CalibrationOptions opts;
        if (background_step > 0)
            opts.background_step = background_step;
        opts.precision = recording->precision;
        auto [it, rep] =
            wm::calibrate(recording->v, locations->v, tpl->v.tpl, offset_min, offset_max, opts);
        *out = new wm_interval_template{std::move(it)};
        if (report)
            *report = to_c(rep);
        return WM_OK;
    } catch (const wm::CalibrationError &e) {
        tl_error = e.what();
        if (report)
            *report = to_c(e.best());
        return WM_ERR_CALIBRATION_FAILED;
    } catch (const wm::Error &e) {
        tl_error = e.what();
        return map_kind(e.kind());
    } catch (const std::exception &e) {
        tl_error = e.what();
        return WM_ERR_INTERNAL;
    }
}

/* ------------------------------------------------------------------ */
/* Resource model                                                      */

void wm_device_kintex_ku85(wm_device_profile *out) {
    if (out)
        to_c(wm::kintex_ku85(), out);
}

wm_status wm_device_load(const char *path, wm_device_profile *out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    return guarded([&] { to_c(wm::load_device_profile(path), out); });
}

wm_status wm_estimate_luts(uint64_t template_samples_m, wm_adder_style style,
                           uint32_t parallelism_d, const wm_device_profile *device,
                           wm_resource_estimate *out) {
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    return guarded([&] {
        const wm::ResourceEstimate est =
            wm::estimate_luts(template_samples_m, from_c(style), parallelism_d, from_c(device));
        out->luts = est.luts;
        out->utilization_fraction = est.utilization_fraction;
        out->adder_style = style;
        out->comparator_luts_per_sample = est.comparator_luts_per_sample;
        out->fits = est.fits ? 1 : 0;
    });
}

wm_status wm_max_template_length(const wm_device_profile *device, wm_adder_style style,
                                 uint32_t parallelism_d, double reserve_fraction,
                                 uint64_t *out) {
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    return guarded([&] {
        *out = wm::max_template_length(from_c(device), from_c(style), parallelism_d,
                                       reserve_fraction);
    });
}

/* ------------------------------------------------------------------ */
/* Synthetic traces                                                    */

wm_status wm_synth_spec_load(const char *path, wm_synth_spec **out) {
    if (!path || !out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path/out");
    *out = nullptr;
    return guarded([&] { *out = new wm_synth_spec{wm::load_synth_spec(path)}; });
}

wm_status wm_synth_spec_save(const wm_synth_spec *spec, const char *path) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_synth_spec(spec->v, path); });
}

wm_status wm_synth_spec_create(uint64_t length, uint64_t seed, wm_synth_spec **out) {
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_synth_spec>();
        handle->v.spec.length = length;
        handle->v.spec.seed = seed;
        *out = handle.release();
    });
}

wm_status wm_synth_spec_set_seed(wm_synth_spec *spec, uint64_t seed) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    spec->v.spec.seed = seed;
    return WM_OK;
}

wm_status wm_synth_spec_set_background(wm_synth_spec *spec, const char *noise,
                                       int32_t amplitude) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    if (!noise)
        return fail(WM_ERR_INVALID_ARGUMENT, "null noise kind");
    const std::string kind = noise;
    if (kind == "none")
        spec->v.spec.background = {wm::NoiseSpec::Kind::none, amplitude};
    else if (kind == "uniform")
        spec->v.spec.background = {wm::NoiseSpec::Kind::uniform, amplitude};
    else if (kind == "gaussian")
        spec->v.spec.background = {wm::NoiseSpec::Kind::gaussian, amplitude};
    else
        return fail(WM_ERR_INVALID_ARGUMENT, "noise kind must be none|uniform|gaussian");
    return WM_OK;
}

wm_status wm_synth_spec_add_pattern(wm_synth_spec *spec, const char *pattern_id,
                                    const wm_template *tpl) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    if (!pattern_id || !tpl)
        return fail(WM_ERR_INVALID_ARGUMENT, "null pattern id/template");
    return guarded([&] { spec->v.patterns[pattern_id] = tpl->v.tpl; });
}

wm_status wm_synth_spec_add_embedding(wm_synth_spec *spec, const char *pattern_id,
                                      uint64_t position, int32_t vertical_offset,
                                      int32_t noise_amplitude, uint64_t deform_prefix) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    if (!pattern_id)
        return fail(WM_ERR_INVALID_ARGUMENT, "null pattern id");
    return guarded([&] {
        spec->v.spec.embeddings.push_back(
            {pattern_id, position, 1, 1, vertical_offset, noise_amplitude, deform_prefix});
    });
}

wm_status wm_synth_generate(const wm_synth_spec *spec, wm_trace **trace, wm_truth **truth) {
    if (wm_status s = require_handle(spec, "synth spec"); s != WM_OK)
        return s;
    return guarded([&] {
        auto [t, gt] = wm::generate(spec->v.spec, spec->v.patterns);
        if (trace) {
            auto handle = std::make_unique<wm_trace>();
            handle->precision = spec->v.spec.precision;
            handle->v = std::move(t);
            *trace = handle.release();
        }
        if (truth)
            *truth = new wm_truth{std::move(gt)};
    });
}

void wm_synth_spec_free(wm_synth_spec *spec) { delete spec; }

uint64_t wm_truth_count(const wm_truth *truth) { return truth ? truth->v.size() : 0; }

uint64_t wm_truth_position(const wm_truth *truth, uint64_t index) {
    if (!truth || index >= truth->v.size())
        return 0;
    return truth->v[index].position;
}

const char *wm_truth_pattern(const wm_truth *truth, uint64_t index) {
    if (!truth || index >= truth->v.size())
        return nullptr;
    return truth->v[index].pattern_id.c_str();
}

int wm_truth_well_formed(const wm_truth *truth, uint64_t index) {
    if (!truth || index >= truth->v.size())
        return 0;
    return truth->v[index].well_formed ? 1 : 0;
}

wm_status wm_truth_save_csv(const wm_truth *truth, const char *path) {
    if (wm_status s = require_handle(truth, "truth"); s != WM_OK)
        return s;
    if (!path)
        return fail(WM_ERR_INVALID_ARGUMENT, "null path");
    return guarded([&] { wm::save_truth_csv(truth->v, path); });
}

void wm_truth_free(wm_truth *truth) { delete truth; }

wm_status wm_make_smooth_pattern(uint64_t seed, uint64_t length, int32_t amplitude,
                                 uint32_t components, uint32_t min_period,
                                 uint32_t max_period, wm_template **out) {
    if (!out)
        return fail(WM_ERR_INVALID_ARGUMENT, "null out");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<wm_template>();
        handle->v.tpl = wm::make_smooth_pattern(seed, length, amplitude, components, min_period,
                                                max_period);
        *out = handle.release();
    });
}

} /* extern "C" */
