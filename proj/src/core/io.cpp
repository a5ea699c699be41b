// SPDX-License-Identifier: Apache-2.0
#include "core/io.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wm {

namespace {

using nlohmann::json;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof())
        raise(ErrorKind::io, "read failure on '" + path + "'");
    return std::move(buf).str();
}

void write_file(const std::string &path, const std::string &data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(ErrorKind::io, "cannot open '" + path + "' for writing");
    out.write(data.data(), std::streamsize(data.size()));
    if (!out)
        raise(ErrorKind::io, "write failure on '" + path + "'");
}

void put_u16(std::string &out, std::uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char(v >> 8));
}

void put_u64(std::string &out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char *p) {
    return std::uint16_t(p[0] | (std::uint16_t(p[1]) << 8));
}

std::uint64_t get_u64(const unsigned char *p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

json parse_json(const std::string &path) {
    const std::string text = read_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        raise(ErrorKind::parse, "'" + path + "' is not valid JSON");
    return j;
}

template <typename T>
T field(const json &j, const char *name, const std::string &path) {
    auto it = j.find(name);
    if (it == j.end())
        raise(ErrorKind::parse, "'" + path + "' is missing field '" + name + "'");
    try {
        return it->get<T>();
    } catch (const json::exception &) {
        raise(ErrorKind::parse, "'" + path + "' has a malformed '" + std::string(name) + "' field");
    }
}

template <typename T>
T field_or(const json &j, const char *name, T fallback) {
    auto it = j.find(name);
    if (it == j.end())
        return fallback;
    return it->get<T>();
}

std::vector<sample_t> samples_from_json(const json &arr, const std::string &path) {
    std::vector<sample_t> out;
    out.reserve(arr.size());
    for (const json &v : arr) {
        if (!v.is_number_integer())
            raise(ErrorKind::parse, "'" + path + "' contains a non-integer sample");
        const std::int64_t s = v.get<std::int64_t>();
        if (s < std::numeric_limits<sample_t>::min() || s > std::numeric_limits<sample_t>::max())
            raise(ErrorKind::range, "'" + path + "' contains sample " + std::to_string(s) +
                                        " outside the 16-bit container");
        out.push_back(sample_t(s));
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    return cells;
}

std::int64_t parse_int(const std::string &text, const std::string &path) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception &) {
        raise(ErrorKind::parse, "'" + path + "': malformed integer '" + text + "'");
    }
}

} // namespace

void save_trace(const Trace &trace, const std::string &path, std::uint32_t precision_p) {
    validate_trace(trace, precision_p);
    std::string out;
    out.reserve(24 + 2 * trace.samples.size());
    out.append(kTraceMagic, 4);
    put_u16(out, kTraceVersion);
    put_u16(out, std::uint16_t(precision_p));
    put_u64(out, trace.samples.size());
    static_assert(sizeof(double) == 8);
    std::uint64_t rateBits;
    std::memcpy(&rateBits, &trace.sample_rate_hz, 8);
    put_u64(out, rateBits);
    for (sample_t s : trace.samples)
        put_u16(out, std::uint16_t(s));
    write_file(path, out);
}

Trace load_trace(const std::string &path) {
    const std::string data = read_file(path);
    if (data.size() < 24)
        raise(ErrorKind::parse, "'" + path + "' is too short to be a trace file");
    const auto *p = reinterpret_cast<const unsigned char *>(data.data());
    if (std::memcmp(p, kTraceMagic, 4) != 0)
        raise(ErrorKind::parse, "'" + path + "' has bad magic (not a WMTR trace)");
    const std::uint16_t version = get_u16(p + 4);
    if (version != kTraceVersion)
        raise(ErrorKind::parse,
              "'" + path + "' uses unsupported trace version " + std::to_string(version));
    const std::uint16_t precision = get_u16(p + 6);
    validate_precision(precision);
    const std::uint64_t count = get_u64(p + 8);
    const std::uint64_t rateBits = get_u64(p + 16);

    const std::uint64_t expected = 24 + 2 * count;
    if (data.size() != expected)
        raise(ErrorKind::parse, "'" + path + "' payload truncated: expected " +
                                    std::to_string(expected) + " bytes, found " +
                                    std::to_string(data.size()));

    Trace trace;
    std::memcpy(&trace.sample_rate_hz, &rateBits, 8);
    trace.label = std::filesystem::path(path).stem().string();
    trace.samples.resize(count);
    for (std::uint64_t i = 0; i < count; ++i)
        trace.samples[i] = sample_t(get_u16(p + 24 + 2 * i));
    validate_trace(trace, precision);
    return trace;
}

std::uint32_t trace_file_precision(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::io, "cannot open '" + path + "' for reading");
    unsigned char header[8];
    if (!in.read(reinterpret_cast<char *>(header), 8))
        raise(ErrorKind::parse, "'" + path + "' is too short to be a trace file");
    if (std::memcmp(header, kTraceMagic, 4) != 0)
        raise(ErrorKind::parse, "'" + path + "' has bad magic (not a WMTR trace)");
    return get_u16(header + 6);
}

namespace {

json report_to_json(const CalibrationReport &report) {
    return json{{"chosen_offset", report.chosen_offset},
                {"chosen_threshold", report.chosen_threshold},
                {"true_score_min", report.true_score_min},
                {"background_score_max", report.background_score_max},
                {"margin", report.margin}};
}

CalibrationReport report_from_json(const json &j, const std::string &path) {
    CalibrationReport report;
    report.chosen_offset = field<std::uint32_t>(j, "chosen_offset", path);
    report.chosen_threshold = field<std::uint32_t>(j, "chosen_threshold", path);
    report.true_score_min = field<std::int64_t>(j, "true_score_min", path);
    report.background_score_max = field<std::int64_t>(j, "background_score_max", path);
    report.margin = field<std::int64_t>(j, "margin", path);
    return report;
}

} // namespace

void save_template(const StoredTemplate &stored, const std::string &path) {
    json j{{"format", "wavematch-template"},
           {"version", 1},
           {"stride", stored.tpl.stride},
           {"positional_buffer", stored.tpl.positional_buffer},
           {"samples", stored.tpl.samples}};
    if (stored.calibration) {
        const auto &[it, report] = *stored.calibration;
        j["calibration"] = json{{"upper", it.upper},
                                {"lower", it.lower},
                                {"threshold", it.threshold},
                                {"source_stride", it.source_stride},
                                {"source_length", it.source_length},
                                {"report", report_to_json(report)}};
    }
    write_file(path, j.dump(2) + "\n");
}

StoredTemplate load_template(const std::string &path) {
    const json j = parse_json(path);
    if (field_or<std::string>(j, "format", "") != "wavematch-template")
        raise(ErrorKind::parse, "'" + path + "' is not a wavematch template document");

    StoredTemplate stored;
    stored.tpl.samples = samples_from_json(field<json>(j, "samples", path), path);
    stored.tpl.stride = field_or<std::uint32_t>(j, "stride", 1);
    stored.tpl.positional_buffer = field_or<std::uint32_t>(j, "positional_buffer", 0);
    validate_template(stored.tpl, kMaxPrecision);

    if (j.contains("calibration")) {
        const json &c = j["calibration"];
        IntervalTemplate it;
        it.upper = samples_from_json(field<json>(c, "upper", path), path);
        it.lower = samples_from_json(field<json>(c, "lower", path), path);
        it.threshold = field<std::uint32_t>(c, "threshold", path);
        it.source_stride = field_or<std::uint32_t>(c, "source_stride", stored.tpl.stride);
        it.source_length = field_or<std::uint64_t>(c, "source_length", stored.tpl.samples.size());
        validate_interval_template(it);
        stored.calibration = {std::move(it), report_from_json(field<json>(c, "report", path), path)};
    }
    return stored;
}

void save_events_csv(const std::vector<MatchEvent> &events, const std::string &path) {
    std::string out = "start_index,lane,score,trigger_index\n";
    for (const MatchEvent &e : events) {
        out += std::to_string(e.start_index);
        out += ',';
        out += std::to_string(e.lane);
        out += ',';
        out += std::to_string(e.score);
        out += ',';
        out += std::to_string(e.trigger_index);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<MatchEvent> load_events_csv(const std::string &path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "start_index,lane,score,trigger_index")
        raise(ErrorKind::parse, "'" + path + "' is not an event log");
    std::vector<MatchEvent> events;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4)
            raise(ErrorKind::parse, "'" + path + "': expected 4 columns, got " +
                                        std::to_string(cells.size()));
        MatchEvent e;
        e.start_index = std::uint64_t(parse_int(cells[0], path));
        e.lane = std::uint32_t(parse_int(cells[1], path));
        e.score = std::uint32_t(parse_int(cells[2], path));
        e.trigger_index = std::uint64_t(parse_int(cells[3], path));
        if (!events.empty() && e.start_index <= events.back().start_index)
            raise(ErrorKind::parse, "'" + path + "': rows not sorted by start_index");
        events.push_back(e);
    }
    return events;
}

void save_locations_csv(const LocatedOperations &ops, const std::string &path) {
    std::string out = "# span=" + std::to_string(ops.span) + "\nstart_index\n";
    for (std::uint64_t loc : ops.locations)
        out += std::to_string(loc) + "\n";
    write_file(path, out);
}

LocatedOperations load_locations_csv(const std::string &path) {
    std::istringstream in(read_file(path));
    LocatedOperations ops;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# span=", 0) != 0)
        raise(ErrorKind::parse, "'" + path + "' is not a locations file");
    ops.span = std::uint64_t(parse_int(line.substr(7), path));
    if (!std::getline(in, line) || line != "start_index")
        raise(ErrorKind::parse, "'" + path + "' is missing the start_index header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const std::uint64_t loc = std::uint64_t(parse_int(line, path));
        if (!ops.locations.empty() && loc <= ops.locations.back())
            raise(ErrorKind::parse, "'" + path + "': locations not strictly increasing");
        ops.locations.push_back(loc);
    }
    return ops;
}

void save_rejected_csv(const LocatedOperations &ops, const std::string &path) {
    std::string out = "index,reason\n";
    for (const auto &r : ops.rejected)
        out += std::to_string(r.index) + "," + r.reason + "\n";
    write_file(path, out);
}

void save_truth_csv(const std::vector<GroundTruthEntry> &truth, const std::string &path) {
    std::string out = "position,pattern,well_formed\n";
    for (const GroundTruthEntry &t : truth)
        out += std::to_string(t.position) + "," + t.pattern_id + "," +
               (t.well_formed ? "1" : "0") + "\n";
    write_file(path, out);
}

std::vector<GroundTruthEntry> load_truth_csv(const std::string &path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "position,pattern,well_formed")
        raise(ErrorKind::parse, "'" + path + "' is not a ground-truth file");
    std::vector<GroundTruthEntry> truth;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3)
            raise(ErrorKind::parse, "'" + path + "': expected 3 columns");
        truth.push_back({std::uint64_t(parse_int(cells[0], path)), cells[1],
                         parse_int(cells[2], path) != 0});
    }
    return truth;
}

void save_waveform_csv(const std::vector<std::uint8_t> &bits, const std::string &path) {
    std::string out = "trigger_start,trigger_length\n";
    std::size_t i = 0;
    while (i < bits.size()) {
        if (!bits[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < bits.size() && bits[j])
            ++j;
        out += std::to_string(i) + "," + std::to_string(j - i) + "\n";
        i = j;
    }
    write_file(path, out);
}

DeviceProfile load_device_profile(const std::string &path) {
    const json j = parse_json(path);
    DeviceProfile device;
    device.name = field<std::string>(j, "name", path);
    device.lut_capacity = field<std::uint64_t>(j, "lut_capacity", path);
    if (device.lut_capacity == 0)
        raise(ErrorKind::parse, "'" + path + "': lut_capacity must be positive");
    return device;
}

void save_device_profile(const DeviceProfile &device, const std::string &path) {
    write_file(path, json{{"name", device.name}, {"lut_capacity", device.lut_capacity}}.dump(2) +
                         "\n");
}

namespace {

Template pattern_from_json(const json &p, const std::string &path,
                           const std::filesystem::path &baseDir) {
    const std::string kind = field_or<std::string>(p, "kind", "samples");
    if (kind == "samples") {
        Template tpl;
        tpl.samples = samples_from_json(field<json>(p, "samples", path), path);
        validate_template(tpl, kMaxPrecision);
        return tpl;
    }
    if (kind == "random_smooth") {
        return make_smooth_pattern(field<std::uint64_t>(p, "seed", path),
                                   field<std::size_t>(p, "length", path),
                                   field<std::int32_t>(p, "amplitude", path),
                                   field_or<std::uint32_t>(p, "components", 8),
                                   field_or<std::uint32_t>(p, "min_period", 16),
                                   field_or<std::uint32_t>(p, "max_period", 256));
    }
    if (kind == "file") {
        std::filesystem::path ref(field<std::string>(p, "path", path));
        if (ref.is_relative())
            ref = baseDir / ref;
        return load_template(ref.string()).tpl;
    }
    raise(ErrorKind::parse, "'" + path + "': unknown pattern kind '" + kind + "'");
}

Embedding embedding_from_json(const json &e, const std::string &path) {
    Embedding emb;
    emb.pattern_id = field<std::string>(e, "pattern", path);
    emb.position = field<std::uint64_t>(e, "position", path);
    emb.scale_num = field_or<std::int64_t>(e, "scale_num", 1);
    emb.scale_den = field_or<std::int64_t>(e, "scale_den", 1);
    emb.vertical_offset = field_or<std::int32_t>(e, "vertical_offset", 0);
    emb.noise_amplitude = field_or<std::int32_t>(e, "noise_amplitude", 0);
    emb.deform_prefix = field_or<std::uint64_t>(e, "deform_prefix", 0);
    return emb;
}

NoiseSpec::Kind noise_kind_from_name(const std::string &name, const std::string &path) {
    if (name == "none")
        return NoiseSpec::Kind::none;
    if (name == "uniform")
        return NoiseSpec::Kind::uniform;
    if (name == "gaussian")
        return NoiseSpec::Kind::gaussian;
    raise(ErrorKind::parse, "'" + path + "': unknown noise kind '" + name + "'");
}

const char *noise_kind_name(NoiseSpec::Kind kind) {
    switch (kind) {
    case NoiseSpec::Kind::none:
        return "none";
    case NoiseSpec::Kind::uniform:
        return "uniform";
    case NoiseSpec::Kind::gaussian:
        return "gaussian";
    }
    return "none";
}

} // namespace

SynthSpecFile load_synth_spec(const std::string &path) {
    const json j = parse_json(path);
    if (field_or<std::string>(j, "format", "") != "wavematch-synth")
        raise(ErrorKind::parse, "'" + path + "' is not a wavematch synthesis document");

    SynthSpecFile file;
    file.spec.length = field<std::uint64_t>(j, "length", path);
    file.spec.seed = field<std::uint64_t>(j, "seed", path);
    file.spec.precision = field_or<std::uint32_t>(j, "precision", kDefaultPrecision);
    file.spec.sample_rate_hz = field_or<double>(j, "sample_rate_hz", 1.0e10);

    if (j.contains("background")) {
        const json &b = j["background"];
        file.spec.background.kind =
            noise_kind_from_name(field_or<std::string>(b, "noise", "none"), path);
        file.spec.background.amplitude = field_or<std::int32_t>(b, "amplitude", 0);
    }

    const std::filesystem::path baseDir = std::filesystem::path(path).parent_path();
    if (j.contains("patterns")) {
        for (const auto &[id, p] : j["patterns"].items())
            file.patterns.emplace(id, pattern_from_json(p, path, baseDir));
    }

    if (j.contains("embeddings")) {
        for (const json &e : j["embeddings"])
            file.spec.embeddings.push_back(embedding_from_json(e, path));
    }

    // Convenience block: evenly spaced repetitions expand into ordinary
    // embeddings, with the first deform_first occurrences prefix-deformed.
    if (j.contains("repeat")) {
        for (const json &r : j["repeat"]) {
            Embedding proto;
            proto.pattern_id = field<std::string>(r, "pattern", path);
            proto.scale_num = field_or<std::int64_t>(r, "scale_num", 1);
            proto.scale_den = field_or<std::int64_t>(r, "scale_den", 1);
            proto.vertical_offset = field_or<std::int32_t>(r, "vertical_offset", 0);
            proto.noise_amplitude = field_or<std::int32_t>(r, "noise_amplitude", 0);
            const std::uint64_t start = field<std::uint64_t>(r, "start", path);
            const std::uint64_t count = field<std::uint64_t>(r, "count", path);
            const std::uint64_t spacing = field<std::uint64_t>(r, "spacing", path);
            const std::uint64_t deformFirst = field_or<std::uint64_t>(r, "deform_first", 0);
            const std::uint64_t deformPrefix = field_or<std::uint64_t>(r, "deform_prefix", 0);
            for (std::uint64_t i = 0; i < count; ++i) {
                Embedding emb = proto;
                emb.position = start + i * spacing;
                emb.deform_prefix = i < deformFirst ? deformPrefix : 0;
                file.spec.embeddings.push_back(emb);
            }
        }
    }

    std::sort(file.spec.embeddings.begin(), file.spec.embeddings.end(),
              [](const Embedding &a, const Embedding &b) { return a.position < b.position; });
    return file;
}

void save_synth_spec(const SynthSpecFile &file, const std::string &path) {
    json patterns = json::object();
    for (const auto &[id, tpl] : file.patterns)
        patterns[id] = json{{"kind", "samples"}, {"samples", tpl.samples}};

    json embeddings = json::array();
    for (const Embedding &e : file.spec.embeddings) {
        embeddings.push_back(json{{"pattern", e.pattern_id},
                                  {"position", e.position},
                                  {"scale_num", e.scale_num},
                                  {"scale_den", e.scale_den},
                                  {"vertical_offset", e.vertical_offset},
                                  {"noise_amplitude", e.noise_amplitude},
                                  {"deform_prefix", e.deform_prefix}});
    }

    const json j{{"format", "wavematch-synth"},
                 {"version", 1},
                 {"length", file.spec.length},
                 {"seed", file.spec.seed},
                 {"precision", file.spec.precision},
                 {"sample_rate_hz", file.spec.sample_rate_hz},
                 {"background",
                  json{{"noise", noise_kind_name(file.spec.background.kind)},
                       {"amplitude", file.spec.background.amplitude}}},
                 {"patterns", patterns},
                 {"embeddings", embeddings}};
    write_file(path, j.dump(2) + "\n");
}

void save_plot_csv(const Trace &trace, const std::vector<MatchEvent> &events,
                   std::uint32_t decimation, const std::string &path) {
    if (decimation < 1)
        raise(ErrorKind::invalid_argument, "plot decimation must be >= 1");
    std::string out = "index,value,event\n";
    std::size_t next = 0;
    for (std::size_t i = 0; i < trace.samples.size(); i += decimation) {
        while (next < events.size() && events[next].start_index < i)
            ++next;
        const bool mark = next < events.size() && events[next].start_index < i + decimation;
        out += std::to_string(i) + "," + std::to_string(trace.samples[i]) + "," +
               (mark ? "1" : "0") + "\n";
    }
    write_file(path, out);
}

} // namespace wm
