// SPDX-License-Identifier: Apache-2.0
#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/rng.hpp"

namespace wm {

namespace {

// Stream ids for the counter RNG. Embedding streams are keyed by position,
// not by list order, so reordering the spec cannot change the trace.
constexpr std::uint64_t kBackgroundStream = 0;

std::uint64_t embedding_noise_stream(std::uint64_t position) { return 2 * position + 2; }
std::uint64_t embedding_deform_stream(std::uint64_t position) { return 2 * position + 3; }

std::int64_t noise_at(const NoiseSpec &noise, std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index) {
    switch (noise.kind) {
    case NoiseSpec::Kind::none:
        return 0;
    case NoiseSpec::Kind::uniform:
        return rng::uniform_int(seed, stream, index, noise.amplitude);
    case NoiseSpec::Kind::gaussian:
        return std::llround(rng::gaussian(seed, stream, index) * double(noise.amplitude));
    }
    return 0;
}

std::int64_t round_half_away(std::int64_t num, std::int64_t den) {
    // den > 0; rounds num/den half away from zero.
    const std::int64_t q = num / den;
    const std::int64_t r = num % den;
    if (2 * std::abs(r) >= den)
        return q + (num < 0 ? -1 : 1);
    return q;
}

} // namespace

std::pair<Trace, std::vector<GroundTruthEntry>>
generate(const SynthSpec &spec, const std::map<std::string, Template> &patterns) {
    validate_precision(spec.precision);
    if (spec.length > kMaxSynthLength)
        raise(ErrorKind::invalid_argument,
              "synthetic trace length " + std::to_string(spec.length) +
                  " exceeds the desk-scale cap of " + std::to_string(kMaxSynthLength));

    // Validate embeddings against the referenced patterns.
    struct Placed {
        const Embedding *emb;
        const Template *pattern;
    };
    std::vector<Placed> placed;
    placed.reserve(spec.embeddings.size());
    for (const Embedding &e : spec.embeddings) {
        auto iter = patterns.find(e.pattern_id);
        if (iter == patterns.end())
            raise(ErrorKind::invalid_argument, "unknown pattern id '" + e.pattern_id + "'");
        const Template &pat = iter->second;
        if (pat.samples.empty())
            raise(ErrorKind::invalid_argument, "pattern '" + e.pattern_id + "' is empty");
        if (e.scale_den <= 0)
            raise(ErrorKind::invalid_argument, "embedding scale denominator must be positive");
        if (e.position + pat.samples.size() > spec.length)
            raise(ErrorKind::invalid_argument,
                  "embedding at " + std::to_string(e.position) + " does not fit in the trace");
        if (e.deform_prefix > pat.samples.size())
            raise(ErrorKind::invalid_argument, "deform prefix longer than the pattern");
        placed.push_back({&e, &pat});
    }
    std::sort(placed.begin(), placed.end(),
              [](const Placed &a, const Placed &b) { return a.emb->position < b.emb->position; });
    for (std::size_t i = 1; i < placed.size(); ++i) {
        const std::uint64_t prevEnd =
            placed[i - 1].emb->position + placed[i - 1].pattern->samples.size();
        if (placed[i].emb->position < prevEnd)
            raise(ErrorKind::invalid_argument,
                  "embeddings overlap at position " + std::to_string(placed[i].emb->position));
    }

    Trace trace;
    trace.sample_rate_hz = spec.sample_rate_hz;
    trace.samples.resize(spec.length);
    for (std::uint64_t i = 0; i < spec.length; ++i)
        trace.samples[i] =
            clamp_sample(noise_at(spec.background, spec.seed, kBackgroundStream, i), spec.precision);

    std::vector<GroundTruthEntry> truth;
    truth.reserve(placed.size());
    for (const Placed &p : placed) {
        const Embedding &e = *p.emb;
        const std::vector<sample_t> &pat = p.pattern->samples;
        NoiseSpec jitter{e.noise_amplitude > 0 ? NoiseSpec::Kind::uniform : NoiseSpec::Kind::none,
                         e.noise_amplitude};

        // Deformed prefixes are replaced with pattern-free noise at the
        // pattern's own power, so they look like signal of the wrong shape
        // rather than silence or clipping.
        double energy = 0.0;
        for (sample_t s : pat) {
            const double v = double(round_half_away(e.scale_num * s, e.scale_den));
            energy += v * v;
        }
        // Uniform +/-a has variance a^2/3; a = rms*sqrt(3) matches the power.
        const std::int64_t deformAmp = std::max<std::int64_t>(
            1, std::llround(std::sqrt(3.0 * energy / double(pat.size()))));

        for (std::uint64_t i = 0; i < pat.size(); ++i) {
            std::int64_t value;
            if (i < e.deform_prefix) {
                value = e.vertical_offset + rng::uniform_int(spec.seed,
                                                             embedding_deform_stream(e.position),
                                                             i, deformAmp);
            } else {
                value = round_half_away(e.scale_num * std::int64_t(pat[i]), e.scale_den) +
                        e.vertical_offset +
                        noise_at(jitter, spec.seed, embedding_noise_stream(e.position), i);
            }
            trace.samples[e.position + i] = clamp_sample(value, spec.precision);
        }
        truth.push_back({e.position, e.pattern_id, e.deform_prefix == 0});
    }
    return {std::move(trace), std::move(truth)};
}

Template make_smooth_pattern(std::uint64_t seed, std::size_t length, std::int32_t amplitude,
                             std::uint32_t components, std::uint32_t min_period,
                             std::uint32_t max_period) {
    if (length == 0)
        raise(ErrorKind::invalid_argument, "pattern length must be >= 1");
    if (amplitude < 1)
        raise(ErrorKind::invalid_argument, "pattern amplitude must be >= 1");
    if (components == 0 || min_period < 2 || max_period < min_period)
        raise(ErrorKind::invalid_argument, "bad pattern shape parameters");

    struct Component {
        double omega, phase, weight;
    };
    std::vector<Component> comps(components);
    const double logLo = std::log(double(min_period));
    const double logHi = std::log(double(max_period));
    for (std::uint32_t kC = 0; kC < components; ++kC) {
        const double period = std::exp(logLo + (logHi - logLo) * rng::uniform01(seed, 101, kC));
        comps[kC] = {2.0 * std::numbers::pi / period,
                     2.0 * std::numbers::pi * rng::uniform01(seed, 102, kC),
                     0.5 + 0.5 * rng::uniform01(seed, 103, kC)};
    }

    std::vector<double> raw(length);
    double peak = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        double v = 0.0;
        for (const Component &c : comps)
            v += c.weight * std::sin(c.omega * double(i) + c.phase);
        raw[i] = v;
        peak = std::max(peak, std::abs(v));
    }
    if (peak == 0.0)
        peak = 1.0;

    Template tpl;
    tpl.samples.resize(length);
    for (std::size_t i = 0; i < length; ++i)
        tpl.samples[i] = static_cast<sample_t>(std::llround(raw[i] / peak * amplitude));
    return tpl;
}

} // namespace wm
