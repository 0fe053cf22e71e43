#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "anahita/core.hpp"
#include "anahita/sensors.hpp"

namespace anahita {

struct BatteryPod {
  bool present = true;
  double soc = 1.0;              // fraction
  double capacity_ah = 10.0;     // 10000 mAh packs
  double v_full = 25.2;
  double v_empty = 19.8;

  double voltage() const { return v_empty + soc * (v_full - v_empty); }
};

enum class Rail { v5 = 0, v12 = 1, v19 = 2, unregulated = 3 };
inline constexpr int kNumRails = 4;
inline constexpr Rail kComputerRail = Rail::v19;  // onboard computer supply

struct RailState {
  std::array<double, kNumRails> nominal_v{5.0, 12.0, 19.0, 22.2};
  std::array<double, kNumRails> measured_v{};
  std::array<double, kNumRails> measured_i{};
  std::array<bool, kNumRails> powered{};
};

struct KillState {
  bool hard_kill = false;
  bool soft_kill = false;
};

struct PowerState {
  std::array<BatteryPod, 2> pods;
  RailState rails;

  double bus_voltage() const {
    double v = 0.0;
    for (const auto& p : pods)
      if (p.present && p.soc > 0.0) v = std::max(v, p.voltage());
    return v;
  }

  bool bus_powered() const { return bus_voltage() > 0.0; }
};

/// Coulomb-counting discharge step. Drawn charge splits across present
/// pods proportional to state of charge, so hot-swapping one pod never
/// drops the bus while the other holds charge.
inline PowerState step_power(const PowerState& in,
                             const std::array<double, kNumRails>& loads_a,
                             const KillState& kill, double dt) {
  if (dt <= 0.0) throw ValidationError("step_power: dt must be positive");
  PowerState out = in;

  const bool bus_up = !kill.hard_kill && in.bus_powered();

  double total_current = 0.0;
  for (int r = 0; r < kNumRails; ++r) {
    const auto k = static_cast<size_t>(r);
    bool rail_on = bus_up;
    if (kill.soft_kill && static_cast<Rail>(r) != kComputerRail) rail_on = false;
    out.rails.powered[k] = rail_on;
    if (rail_on) {
      out.rails.measured_v[k] = static_cast<Rail>(r) == Rail::unregulated
                                    ? in.bus_voltage()
                                    : out.rails.nominal_v[k];
      out.rails.measured_i[k] = std::max(loads_a[k], 0.0);
      total_current += std::max(loads_a[k], 0.0);
    } else {
      out.rails.measured_v[k] = 0.0;
      out.rails.measured_i[k] = 0.0;
    }
  }

  if (bus_up && total_current > 0.0) {
    const double delta_ah = total_current * dt / 3600.0;
    double soc_sum = 0.0;
    for (const auto& p : out.pods)
      if (p.present) soc_sum += p.soc;
    if (soc_sum > 0.0) {
      for (auto& p : out.pods) {
        if (!p.present) continue;
        const double share = delta_ah * (p.soc / soc_sum);
        p.soc = std::max(0.0, p.soc - share / p.capacity_ah);
      }
    }
  }
  return out;
}

struct MonitorConfig {
  // Divider ratios keep every rail under the 5 V ADC range.
  std::array<double, kNumRails> divider{1.0, 0.4, 0.25, 0.19};
  double hall_sensitivity = 0.1;  // V/A
  double hall_offset = 2.5;       // V at zero current
  int adc_counts = 1023;          // 10-bit
};

struct MonitorReading {
  int v_code = 0;
  int i_code = 0;
};

inline MonitorReading monitor(const RailState& rails, Rail rail,
                              const MonitorConfig& cfg = {}) {
  const auto k = static_cast<size_t>(rail);
  MonitorReading r;
  const double v = std::clamp(rails.measured_v[k] * cfg.divider[k], 0.0, 5.0);
  r.v_code = static_cast<int>(std::lround(v / 5.0 * cfg.adc_counts));
  const double vi = std::clamp(
      rails.measured_i[k] * cfg.hall_sensitivity + cfg.hall_offset, 0.0, 5.0);
  r.i_code = static_cast<int>(std::lround(vi / 5.0 * cfg.adc_counts));
  return r;
}

}  // namespace anahita
