// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/calibration.hpp"
#include "core/engine.hpp"
#include "core/resource_model.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

namespace wm {

// Binary trace container: 24-byte little-endian header
//   offset 0  magic "WMTR"
//   offset 4  u16 format version (currently 1)
//   offset 6  u16 precision_p
//   offset 8  u64 sample count
//   offset 16 f64 sample rate in Hz
// followed by the payload of 16-bit little-endian signed samples.
inline constexpr char kTraceMagic[4] = {'W', 'M', 'T', 'R'};
inline constexpr std::uint16_t kTraceVersion = 1;

void save_trace(const Trace &trace, const std::string &path,
                std::uint32_t precision_p = kDefaultPrecision);
/// Rejects bad magic, unsupported versions, truncated payloads, and
/// out-of-range samples with distinct error kinds.
Trace load_trace(const std::string &path);
std::uint32_t trace_file_precision(const std::string &path);

/// Template document: samples, stride, positional buffer, and (optionally)
/// the calibrated corridor plus its report.
struct StoredTemplate {
    Template tpl;
    std::optional<std::pair<IntervalTemplate, CalibrationReport>> calibration;
};

void save_template(const StoredTemplate &stored, const std::string &path);
StoredTemplate load_template(const std::string &path);

void save_events_csv(const std::vector<MatchEvent> &events, const std::string &path);
std::vector<MatchEvent> load_events_csv(const std::string &path);

void save_locations_csv(const LocatedOperations &ops, const std::string &path);
LocatedOperations load_locations_csv(const std::string &path);
void save_rejected_csv(const LocatedOperations &ops, const std::string &path);

void save_truth_csv(const std::vector<GroundTruthEntry> &truth, const std::string &path);
std::vector<GroundTruthEntry> load_truth_csv(const std::string &path);

/// Trigger waveform as run-length rows: trigger_start,trigger_length.
void save_waveform_csv(const std::vector<std::uint8_t> &bits, const std::string &path);

DeviceProfile load_device_profile(const std::string &path);
void save_device_profile(const DeviceProfile &device, const std::string &path);

/// Synthesis configuration document: spec plus the pattern table it
/// references. Patterns may be given inline, generated (random_smooth), or
/// loaded from a template file; they are resolved at load time and written
/// back inline, so a load/save cycle is canonical and lossless.
struct SynthSpecFile {
    SynthSpec spec;
    std::map<std::string, Template> patterns;
};

SynthSpecFile load_synth_spec(const std::string &path);
void save_synth_spec(const SynthSpecFile &file, const std::string &path);

/// Decimated trace with event markers, for offline plotting.
void save_plot_csv(const Trace &trace, const std::vector<MatchEvent> &events,
                   std::uint32_t decimation, const std::string &path);

} // namespace wm
