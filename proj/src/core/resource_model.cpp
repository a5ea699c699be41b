// SPDX-License-Identifier: Apache-2.0
#include "core/resource_model.hpp"

#include <array>

#include "core/error.hpp"

namespace wm {

namespace {

struct Anchor {
    std::uint64_t samples;
    std::uint64_t luts;
};

// Measured totals of the full d = 32 design (comparators, adder trees,
// trigger logic) per adder style.
constexpr std::array<Anchor, 3> kLutBased{{{700, 169'386}, {1400, 338'948}, {2800, 680'472}}};
constexpr std::array<Anchor, 3> kCarryLogic{{{700, 611'651}, {1400, 1'222'969}, {2800, 2'447'523}}};

const std::array<Anchor, 3> &anchors_for(AdderStyle style) {
    return style == AdderStyle::lut_based ? kLutBased : kCarryLogic;
}

/// Piecewise-linear interpolation/extrapolation on m, exact at the anchors;
/// rounding is half away from zero in exact integer arithmetic.
std::int64_t interpolate(const std::array<Anchor, 3> &a, std::int64_t m) {
    const Anchor *lo = &a[0];
    const Anchor *hi = &a[1];
    if (m > std::int64_t(a[1].samples)) {
        lo = &a[1];
        hi = &a[2];
    }
    const std::int64_t dm = std::int64_t(hi->samples) - std::int64_t(lo->samples);
    const std::int64_t dl = std::int64_t(hi->luts) - std::int64_t(lo->luts);
    const std::int64_t num = std::int64_t(lo->luts) * dm + (m - std::int64_t(lo->samples)) * dl;
    const std::int64_t rounded = num >= 0 ? (num + dm / 2) / dm : -((-num + dm / 2) / dm);
    return rounded;
}

} // namespace

DeviceProfile kintex_ku85() { return {"KU85", 498'453}; }

const char *adder_style_name(AdderStyle style) {
    return style == AdderStyle::lut_based ? "lut" : "carry";
}

ResourceEstimate estimate_luts(std::uint64_t template_samples_m, AdderStyle style,
                               std::uint32_t parallelism_d, const DeviceProfile &device) {
    if (template_samples_m < 1)
        raise(ErrorKind::invalid_argument, "template must have at least one compared sample");
    if (parallelism_d < 1)
        raise(ErrorKind::invalid_argument, "parallelism must be >= 1");

    std::int64_t base = interpolate(anchors_for(style), std::int64_t(template_samples_m));
    if (base < 0)
        base = 0;
    // Each of the d lanes replicates the comparator/adder fabric; the
    // anchors were measured at d = 32.
    const std::int64_t scaled = (base * parallelism_d + 16) / 32;

    ResourceEstimate est;
    est.luts = std::uint64_t(scaled);
    est.adder_style = style;
    est.comparator_luts_per_sample = style == AdderStyle::lut_based ? 6 : 22;
    est.utilization_fraction =
        device.lut_capacity > 0 ? double(est.luts) / double(device.lut_capacity) : 0.0;
    est.fits = device.lut_capacity > 0 && est.utilization_fraction <= 1.0;
    return est;
}

std::uint64_t max_template_length(const DeviceProfile &device, AdderStyle style,
                                  std::uint32_t parallelism_d, double reserve_fraction) {
    if (reserve_fraction < 0.0 || reserve_fraction >= 1.0)
        raise(ErrorKind::invalid_argument, "reserve fraction must lie in [0, 1)");
    if (device.lut_capacity == 0)
        return 0;

    const double budget = 1.0 - reserve_fraction;
    auto within = [&](std::uint64_t m) {
        return estimate_luts(m, style, parallelism_d, device).utilization_fraction <= budget;
    };
    if (!within(1))
        return 0;

    std::uint64_t lo = 1, hi = 2;
    while (within(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (std::uint64_t(1) << 40))
            raise(ErrorKind::internal, "resource model failed to bound the template length");
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (within(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace wm
