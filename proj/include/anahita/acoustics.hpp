#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "anahita/core.hpp"
#include "anahita/sensors.hpp"

namespace anahita {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoPeakError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleDelayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Four hydrophones in the body frame.
struct ArrayGeometry {
  std::array<Vec3, 4> positions;
  double sound_speed = 1500.0;  // m/s

  /// Square of the given side length in the body x-y plane.
  static ArrayGeometry square(double side = 0.2, double sound_speed = 1500.0) {
    const double a = side / 2.0;
    ArrayGeometry g;
    g.positions = {Vec3(a, a, 0), Vec3(-a, a, 0), Vec3(-a, -a, 0), Vec3(a, -a, 0)};
    g.sound_speed = sound_speed;
    return g;
  }

  void validate() const {
    if (sound_speed <= 0.0) throw GeometryError("sound speed must be positive");
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j)
        if ((positions[i] - positions[j]).norm() < 1e-9)
          throw GeometryError("hydrophone positions must be distinct");
  }
};

struct Trace {
  std::vector<double> samples;
  double fs = 1e6;  // Hz
};

struct AnalogChainConfig {
  double gain1 = 50.0;        // preamp
  int lpf_order = 6;
  double lpf_cutoff = 37500.0;  // Hz
  double gain2 = 1.0;         // maps filter output into ADC full scale
};

struct PingConfig {
  double fs = 1e6;            // Hz
  double freq = 30000.0;      // Hz, inside the LPF passband
  double ping_duration = 0.004;  // s
  double trace_duration = 0.006;  // s
  double start_time = 0.0005;  // s, ping onset at the closest hydrophone
  double snr_db = 40.0;       // per channel, relative to ping RMS
};

/// Per-channel tone burst with exact fractional delays distance/c and 1/r
/// amplitude. The burst is rectangular: the sharp onset is what lets the
/// correlator pick the right carrier cycle when the delay exceeds one
/// period. The common travel time to the nearest hydrophone is removed so
/// traces stay short; pairwise differences are unaffected.
inline std::array<Trace, 4> synth_ping(const ArrayGeometry& geom,
                                       const Vec3& pinger_pos,
                                       const PingConfig& cfg, SensorRng& rng) {
  geom.validate();
  if (cfg.freq >= cfg.fs / 2.0)
    throw GeometryError("ping frequency above Nyquist");
  std::array<double, 4> dist;
  double dist_min = 1e300;
  for (size_t i = 0; i < 4; ++i) {
    dist[i] = (pinger_pos - geom.positions[i]).norm();
    if (dist[i] < 1e-6)
      throw GeometryError("pinger coincides with a hydrophone");
    dist_min = std::min(dist_min, dist[i]);
  }

  const auto n = static_cast<size_t>(std::llround(cfg.trace_duration * cfg.fs));
  std::array<Trace, 4> out;
  for (size_t ch = 0; ch < 4; ++ch) {
    Trace& tr = out[ch];
    tr.fs = cfg.fs;
    tr.samples.assign(n, 0.0);
    const double onset = cfg.start_time + (dist[ch] - dist_min) / geom.sound_speed;
    const double amp = 1.0 / dist[ch];
    double sumsq = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / cfg.fs - onset;
      if (t < 0.0 || t > cfg.ping_duration) continue;
      const double s = amp * std::sin(2.0 * kPi * cfg.freq * t);
      tr.samples[k] = s;
      sumsq += s * s;
    }
    const double rms = std::sqrt(sumsq / static_cast<double>(n));
    const double sigma = rms / std::pow(10.0, cfg.snr_db / 20.0);
    if (sigma > 0.0) {
      for (auto& s : tr.samples) s += rng.gaussian(sigma);
    }
  }
  return out;
}

namespace detail {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Butterworth low-pass sections (RBJ bilinear form), unity DC gain.
inline std::vector<Biquad> butterworth_lowpass(int order, double cutoff,
                                               double fs) {
  if (order % 2 != 0) throw ValidationError("even filter order required");
  if (cutoff >= fs / 2.0)
    throw ValidationError("filter cutoff must be below Nyquist");
  const double w0 = 2.0 * kPi * cutoff / fs;
  const double cw = std::cos(w0), sw = std::sin(w0);
  std::vector<Biquad> sections;
  for (int k = 1; k <= order / 2; ++k) {
    const double pole_angle = (2.0 * k - 1.0) * kPi / (2.0 * order);
    const double q = 1.0 / (2.0 * std::sin(pole_angle));
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = (1.0 - cw) / 2.0 / a0;
    s.b1 = (1.0 - cw) / a0;
    s.b2 = s.b0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;
    sections.push_back(s);
  }
  return sections;
}

inline void apply_biquad(const Biquad& s, std::vector<double>& x) {
  double z1 = 0.0, z2 = 0.0;  // direct form II transposed
  for (auto& v : x) {
    const double y = s.b0 * v + z1;
    z1 = s.b1 * v - s.a1 * y + z2;
    z2 = s.b2 * v - s.a2 * y;
    v = y;
  }
}

}  // namespace detail

/// Preamp gain, 6th-order Butterworth low-pass, post gain.
inline Trace analog_chain(const Trace& in, const AnalogChainConfig& cfg) {
  Trace out = in;
  const auto sections =
      detail::butterworth_lowpass(cfg.lpf_order, cfg.lpf_cutoff, in.fs);
  for (auto& v : out.samples) v *= cfg.gain1;
  for (const auto& s : sections) detail::apply_biquad(s, out.samples);
  for (auto& v : out.samples) v *= cfg.gain2;
  return out;
}

/// Clip to +/-full_scale, quantize to `bits` signed levels.
inline std::vector<std::int32_t> adc(const Trace& in, int bits,
                                     double full_scale) {
  const double max_code = std::pow(2.0, bits - 1) - 1.0;
  std::vector<std::int32_t> codes;
  codes.reserve(in.samples.size());
  for (double v : in.samples) {
    const double clipped = std::clamp(v, -full_scale, full_scale);
    codes.push_back(static_cast<std::int32_t>(
        std::lround(clipped / full_scale * max_code)));
  }
  return codes;
}

inline Trace trace_from_codes(const std::vector<std::int32_t>& codes, double fs,
                              int bits, double full_scale) {
  const double max_code = std::pow(2.0, bits - 1) - 1.0;
  Trace t;
  t.fs = fs;
  t.samples.reserve(codes.size());
  for (auto c : codes) t.samples.push_back(c / max_code * full_scale);
  return t;
}

/// Cross-correlation delay estimate, positive when b lags a. The peak is
/// refined with 3-point parabolic interpolation. `max_lag` bounds the
/// search (samples); negative means unrestricted.
inline double tdoa(const Trace& a, const Trace& b, long max_lag = -1) {
  if (a.fs != b.fs || a.samples.size() != b.samples.size())
    throw ValidationError("tdoa: traces must share fs and length");
  const auto n = static_cast<long>(a.samples.size());
  if (n < 2) throw ValidationError("tdoa: traces too short");
  if (max_lag < 0 || max_lag > n - 1) max_lag = n - 1;

  auto xcorr = [&](long lag) {
    // sum over valid n of a[k] * b[k + lag]
    double s = 0.0;
    const long k0 = std::max(0L, -lag);
    const long k1 = std::min(n, n - lag);
    for (long k = k0; k < k1; ++k)
      s += a.samples[static_cast<size_t>(k)] *
           b.samples[static_cast<size_t>(k + lag)];
    return s;
  };

  long best_lag = 0;
  double best = -1e300;
  bool any_nonzero = false;
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    const double c = xcorr(lag);
    if (c != 0.0) any_nonzero = true;
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  if (!any_nonzero) throw NoPeakError("tdoa: degenerate traces, no peak");

  double refined = static_cast<double>(best_lag);
  if (best_lag > -max_lag && best_lag < max_lag) {
    const double ym = xcorr(best_lag - 1);
    const double y0 = best;
    const double yp = xcorr(best_lag + 1);
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) > 1e-30) {
      const double delta = 0.5 * (ym - yp) / denom;
      if (std::abs(delta) <= 1.0) refined += delta;
    }
  }
  return refined / a.fs;
}

struct PairDelay {
  int i = 0;          // reference hydrophone
  int j = 0;          // lagging hydrophone
  double delay = 0.0;  // s, tdoa(trace_i, trace_j)
};

/// Far-field plane-wave bearing from pairwise delays. Solves the x-y
/// direction cosines in least squares over all supplied pairs.
inline double heading(const std::vector<PairDelay>& delays,
                      const ArrayGeometry& geom) {
  if (delays.empty()) throw ValidationError("heading: no pair delays");
  Eigen::MatrixXd A(static_cast<long>(delays.size()), 2);
  Eigen::VectorXd rhs(static_cast<long>(delays.size()));
  long row = 0;
  for (const auto& pd : delays) {
    const Vec3 baseline = geom.positions[static_cast<size_t>(pd.i)] -
                          geom.positions[static_cast<size_t>(pd.j)];
    double range = geom.sound_speed * pd.delay;
    const double limit = baseline.norm();
    // Half-sample interpolation jitter may nudge a delay past the
    // baseline; clamp inside a 2% slack band, reject beyond it.
    if (std::abs(range) > limit * 1.02) {
      throw InfeasibleDelayError(
          "heading: c*dt exceeds the pair baseline (plane-wave constraint)");
    }
    range = std::clamp(range, -limit, limit);
    A(row, 0) = baseline[0];
    A(row, 1) = baseline[1];
    rhs(row) = range;
    ++row;
  }
  const Eigen::Vector2d s = A.colPivHouseholderQr().solve(rhs);
  if (s.norm() < 1e-12) return 0.0;  // overhead/broadside convention
  return std::atan2(s[1], s[0]);
}

/// Standard pair set for the square array: two x-axis pairs, two y-axis.
inline std::vector<PairDelay> square_pairs(const std::array<Trace, 4>& traces,
                                           const ArrayGeometry& geom,
                                           long max_lag = -1) {
  if (max_lag < 0) {
    double max_baseline = 0.0;
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j)
        max_baseline = std::max(
            max_baseline, (geom.positions[i] - geom.positions[j]).norm());
    max_lag = std::lround(max_baseline / geom.sound_speed * traces[0].fs) + 8;
  }
  std::vector<PairDelay> out;
  const int pairs[4][2] = {{0, 1}, {3, 2}, {0, 3}, {1, 2}};
  for (const auto& p : pairs) {
    PairDelay pd;
    pd.i = p[0];
    pd.j = p[1];
    pd.delay = tdoa(traces[static_cast<size_t>(p[0])],
                    traces[static_cast<size_t>(p[1])], max_lag);
    out.push_back(pd);
  }
  return out;
}

}  // namespace anahita
