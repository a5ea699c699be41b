// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace wm {

/// How the matcher's 1-bit adder tree is implemented on the fabric.
enum class AdderStyle {
    carry_logic,
    lut_based,
};

struct DeviceProfile {
    std::string name;
    std::uint64_t lut_capacity = 0;
};

/// Kintex UltraScale KU85 as used by the reference digitizer. The capacity
/// is back-computed so that 338,948 LUTs equals 68% utilization.
DeviceProfile kintex_ku85();

struct ResourceEstimate {
    std::uint64_t luts = 0;
    double utilization_fraction = 0.0;
    AdderStyle adder_style = AdderStyle::lut_based;
    /// Per-sample comparator cost for the style: 6 LUTs (LUT-based) or 22
    /// on average (carry logic).
    std::uint32_t comparator_luts_per_sample = 0;
    bool fits = false;
};

/// Predicted LUT usage of the whole parallel matcher for a template of m
/// compared samples. Piecewise-linear in m, anchored exactly at the
/// measured d = 32 design points {700, 1400, 2800}; per-lane fabric scales
/// linearly in d/32.
ResourceEstimate estimate_luts(std::uint64_t template_samples_m, AdderStyle style,
                               std::uint32_t parallelism_d = 32,
                               const DeviceProfile &device = kintex_ku85());

/// Largest template (compared samples) whose estimate stays within
/// (1 - reserve_fraction) of the device capacity; 0 when even one sample
/// does not fit.
std::uint64_t max_template_length(const DeviceProfile &device, AdderStyle style,
                                  std::uint32_t parallelism_d, double reserve_fraction);

const char *adder_style_name(AdderStyle style);

} // namespace wm
