/* SPDX-License-Identifier: Apache-2.0
 *
 * wavematch — block-parallel real-time waveform matching toolkit.
 *
 * C interface of the shared library. All compound objects are opaque
 * handles created and destroyed by the library; every fallible call
 * returns a wm_status, with a thread-local message available through
 * wm_last_error(). Plain accessors on valid handles cannot fail.
 */
#ifndef WAVEMATCH_WAVEMATCH_H
#define WAVEMATCH_WAVEMATCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wm_status {
    WM_OK = 0,
    WM_ERR_INVALID_ARGUMENT = 1,
    WM_ERR_RANGE = 2,
    WM_ERR_IO = 3,
    WM_ERR_PARSE = 4,
    WM_ERR_UNDEFINED_CORRELATION = 5,
    WM_ERR_CALIBRATION_FAILED = 6,
    WM_ERR_NOT_INITIALIZED = 7,
    WM_ERR_INTERNAL = 8
} wm_status;

const char *wm_version(void);
/* Message of the most recent failure on this thread; empty if none. */
const char *wm_last_error(void);

/* ------------------------------------------------------------------ */
/* Opaque handles                                                      */

typedef struct wm_trace wm_trace;
typedef struct wm_template wm_template;
typedef struct wm_interval_template wm_interval_template;
typedef struct wm_engine wm_engine;
typedef struct wm_events wm_events;
typedef struct wm_waveform wm_waveform;
typedef struct wm_locations wm_locations;
typedef struct wm_synth_spec wm_synth_spec;
typedef struct wm_truth wm_truth;

/* ------------------------------------------------------------------ */
/* Plain structs                                                       */

typedef struct wm_engine_config {
    uint32_t parallelism_d;    /* samples per clock cycle (default 32) */
    uint32_t precision_p;      /* sample precision in bits (default 14) */
    uint32_t latency_l;        /* pipeline cycles until valid (default 4) */
    uint32_t positional_buffer;
    uint64_t holdoff_samples;  /* 0 = one window span */
    uint64_t trigger_duration_samples; /* 0 = one window span */
    int16_t idle_fill;
} wm_engine_config;

void wm_engine_config_default(wm_engine_config *cfg);

typedef struct wm_match_event {
    uint64_t start_index;
    uint32_t lane;
    uint32_t score;
    uint64_t trigger_index;
} wm_match_event;

typedef struct wm_calibration_report {
    uint32_t chosen_offset;
    uint32_t chosen_threshold;
    int64_t true_score_min;
    int64_t background_score_max;
    int64_t margin;
} wm_calibration_report;

typedef enum wm_adder_style {
    WM_ADDER_CARRY_LOGIC = 0,
    WM_ADDER_LUT_BASED = 1
} wm_adder_style;

typedef struct wm_device_profile {
    char name[64];
    uint64_t lut_capacity;
} wm_device_profile;

typedef struct wm_resource_estimate {
    uint64_t luts;
    double utilization_fraction;
    wm_adder_style adder_style;
    uint32_t comparator_luts_per_sample;
    int fits;
} wm_resource_estimate;

typedef struct wm_locate_params {
    double correlation_threshold; /* default 0.8 */
    uint32_t coarse_step;         /* default 4 */
    double reject_floor;          /* default 0.3 */
    int64_t expected_count;       /* negative = unknown */
} wm_locate_params;

void wm_locate_params_default(wm_locate_params *params);

/* ------------------------------------------------------------------ */
/* Traces                                                              */

wm_status wm_trace_create(const int16_t *samples, uint64_t count, double sample_rate_hz,
                          uint32_t precision_p, wm_trace **out);
wm_status wm_trace_load(const char *path, wm_trace **out);
wm_status wm_trace_save(const wm_trace *trace, const char *path);
wm_status wm_trace_slice(const wm_trace *trace, uint64_t start, uint64_t count, wm_trace **out);
uint64_t wm_trace_count(const wm_trace *trace);
const int16_t *wm_trace_samples(const wm_trace *trace);
double wm_trace_sample_rate(const wm_trace *trace);
uint32_t wm_trace_precision(const wm_trace *trace);
void wm_trace_free(wm_trace *trace);

/* ------------------------------------------------------------------ */
/* Templates and corridors                                             */

wm_status wm_template_create(const int16_t *samples, uint64_t count, uint32_t stride,
                             uint32_t positional_buffer, wm_template **out);
wm_status wm_template_load(const char *path, wm_template **out);
wm_status wm_template_save(const wm_template *tpl, const char *path);
/* Same samples, new comparison stride. */
wm_status wm_template_subsample(const wm_template *tpl, uint32_t stride, wm_template **out);
uint64_t wm_template_length(const wm_template *tpl);
const int16_t *wm_template_samples(const wm_template *tpl);
uint32_t wm_template_stride(const wm_template *tpl);
uint32_t wm_template_positional_buffer(const wm_template *tpl);
uint64_t wm_template_compared_positions(const wm_template *tpl);
int wm_template_has_calibration(const wm_template *tpl);
/* Corridor stored by a previous calibration; fails if none is attached. */
wm_status wm_template_interval(const wm_template *tpl, wm_interval_template **out);
wm_status wm_template_calibration_report(const wm_template *tpl, wm_calibration_report *out);
wm_status wm_template_attach_calibration(wm_template *tpl, const wm_interval_template *it,
                                         const wm_calibration_report *report);
void wm_template_free(wm_template *tpl);

/* Corridor bounds clamp(c_i ± offset) over the compared positions; the
 * threshold starts at the compared-position count. */
wm_status wm_interval_template_make(const wm_template *tpl, uint32_t offset,
                                    uint32_t precision_p, wm_interval_template **out);
wm_status wm_interval_template_set_threshold(wm_interval_template *it, uint32_t threshold);
uint64_t wm_interval_template_size(const wm_interval_template *it);
const int16_t *wm_interval_template_upper(const wm_interval_template *it);
const int16_t *wm_interval_template_lower(const wm_interval_template *it);
uint32_t wm_interval_template_threshold(const wm_interval_template *it);
uint32_t wm_interval_template_stride(const wm_interval_template *it);
uint64_t wm_interval_template_window_span(const wm_interval_template *it);
void wm_interval_template_free(wm_interval_template *it);

/* ------------------------------------------------------------------ */
/* Similarity measures                                                 */

wm_status wm_pearson_correlation(const int16_t *t, const int16_t *c, uint64_t n, double *out);
wm_status wm_sad(const int16_t *t, const int16_t *c, uint64_t n, uint64_t *out);
int wm_interval_indicator(int16_t sample, int16_t upper, int16_t lower);
/* Segment must cover the corridor's window span. */
wm_status wm_interval_score(const int16_t *segment, uint64_t length,
                            const wm_interval_template *it, uint32_t *out);

/* ------------------------------------------------------------------ */
/* Matching engine                                                     */

uint64_t wm_compute_excess_samples(uint32_t latency_l, uint32_t parallelism_d,
                                   uint32_t positional_buffer);
uint64_t wm_compute_srg_length(uint64_t template_length_n, uint64_t excess);

wm_status wm_engine_create(const wm_interval_template *it, const wm_engine_config *cfg,
                           wm_engine **out);
/* One clock cycle: consumes exactly parallelism_d samples and fills
 * `output` (d delayed samples), `valid` (d lane bits), and `trigger`. */
wm_status wm_engine_step(wm_engine *engine, const int16_t *block, uint32_t block_len,
                         int16_t *output, uint8_t *valid, int *trigger);
wm_status wm_engine_limit_valid(wm_engine *engine, uint64_t last_valid_start);
uint64_t wm_engine_output_delay(const wm_engine *engine);
uint64_t wm_engine_cycles(const wm_engine *engine);
wm_status wm_engine_events(const wm_engine *engine, wm_events **out);
void wm_engine_free(wm_engine *engine);

/* Cycle-accurate run over a whole trace: hold-off-filtered events plus the
 * full-rate trigger waveform (one bit per stream sample). */
wm_status wm_run_engine(const wm_trace *stream, const wm_interval_template *it,
                        const wm_engine_config *cfg, wm_events **events,
                        wm_waveform **waveform);
/* Throughput mode, no hold-off: every window meeting the threshold. */
wm_status wm_batch_match(const wm_trace *stream, const wm_interval_template *it,
                         wm_events **out);
/* Straight-line oracle with the engine's hold-off policy. */
wm_status wm_scalar_reference_match(const wm_trace *stream, const wm_interval_template *it,
                                    const wm_engine_config *cfg, wm_events **out);

uint64_t wm_events_count(const wm_events *events);
wm_status wm_events_get(const wm_events *events, uint64_t index, wm_match_event *out);
wm_status wm_events_save_csv(const wm_events *events, const char *path);
wm_status wm_events_load_csv(const char *path, wm_events **out);
void wm_events_free(wm_events *events);

uint64_t wm_waveform_length(const wm_waveform *waveform);
const uint8_t *wm_waveform_bits(const wm_waveform *waveform);
wm_status wm_waveform_save_csv(const wm_waveform *waveform, const char *path);
void wm_waveform_free(wm_waveform *waveform);

/* ------------------------------------------------------------------ */
/* Calibration workflow                                                */

wm_status wm_locate_operations(const wm_trace *recording, const wm_trace *seed_segment,
                               const wm_locate_params *params, wm_locations **out);
uint64_t wm_locations_count(const wm_locations *locations);
uint64_t wm_locations_get(const wm_locations *locations, uint64_t index);
uint64_t wm_locations_span(const wm_locations *locations);
uint64_t wm_locations_rejected_count(const wm_locations *locations);
wm_status wm_locations_rejected_get(const wm_locations *locations, uint64_t index,
                                    uint64_t *rejected_index, const char **reason);
wm_status wm_locations_save_csv(const wm_locations *locations, const char *path);
wm_status wm_locations_rejected_save_csv(const wm_locations *locations, const char *path);
wm_status wm_locations_load_csv(const char *path, wm_locations **out);
void wm_locations_free(wm_locations *locations);

wm_status wm_build_template(const wm_trace *recording, const wm_locations *locations,
                            uint64_t length_n, uint32_t positional_buffer, wm_template **out);

/* Sweeps offsets, maximizing the margin between the weakest operation
 * window and the strongest background window. On WM_ERR_CALIBRATION_FAILED
 * the best report is still written to *report. */
wm_status wm_calibrate(const wm_trace *recording, const wm_locations *locations,
                       const wm_template *tpl, uint32_t offset_min, uint32_t offset_max,
                       uint32_t background_step, wm_interval_template **out,
                       wm_calibration_report *report);

/* ------------------------------------------------------------------ */
/* Resource model                                                      */

void wm_device_kintex_ku85(wm_device_profile *out);
wm_status wm_device_load(const char *path, wm_device_profile *out);
wm_status wm_estimate_luts(uint64_t template_samples_m, wm_adder_style style,
                           uint32_t parallelism_d, const wm_device_profile *device,
                           wm_resource_estimate *out);
wm_status wm_max_template_length(const wm_device_profile *device, wm_adder_style style,
                                 uint32_t parallelism_d, double reserve_fraction,
                                 uint64_t *out);

/* ------------------------------------------------------------------ */
/* Synthetic traces                                                    */

wm_status wm_synth_spec_load(const char *path, wm_synth_spec **out);
wm_status wm_synth_spec_save(const wm_synth_spec *spec, const char *path);
wm_status wm_synth_spec_create(uint64_t length, uint64_t seed, wm_synth_spec **out);
wm_status wm_synth_spec_set_seed(wm_synth_spec *spec, uint64_t seed);
/* noise: "none", "uniform", or "gaussian". */
wm_status wm_synth_spec_set_background(wm_synth_spec *spec, const char *noise,
                                       int32_t amplitude);
wm_status wm_synth_spec_add_pattern(wm_synth_spec *spec, const char *pattern_id,
                                    const wm_template *tpl);
wm_status wm_synth_spec_add_embedding(wm_synth_spec *spec, const char *pattern_id,
                                      uint64_t position, int32_t vertical_offset,
                                      int32_t noise_amplitude, uint64_t deform_prefix);
wm_status wm_synth_generate(const wm_synth_spec *spec, wm_trace **trace, wm_truth **truth);
void wm_synth_spec_free(wm_synth_spec *spec);

uint64_t wm_truth_count(const wm_truth *truth);
uint64_t wm_truth_position(const wm_truth *truth, uint64_t index);
const char *wm_truth_pattern(const wm_truth *truth, uint64_t index);
int wm_truth_well_formed(const wm_truth *truth, uint64_t index);
wm_status wm_truth_save_csv(const wm_truth *truth, const char *path);
void wm_truth_free(wm_truth *truth);

/* Band-limited deterministic test pattern. */
wm_status wm_make_smooth_pattern(uint64_t seed, uint64_t length, int32_t amplitude,
                                 uint32_t components, uint32_t min_period,
                                 uint32_t max_period, wm_template **out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WAVEMATCH_WAVEMATCH_H */
