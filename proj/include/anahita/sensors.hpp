#pragma once

#include <cfenv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "anahita/core.hpp"

namespace anahita {

inline constexpr double kDepthResolution = 0.002;  // m, Bar30 class

struct ImuReading {
  double roll = 0.0, pitch = 0.0, yaw = 0.0;  // rad
  double p = 0.0, q = 0.0, r = 0.0;           // rad/s
  double timestamp = 0.0;
};

struct DepthReading {
  double depth = 0.0;  // m, exact multiple of kDepthResolution
  double timestamp = 0.0;
};

struct DvlReading {
  double u = 0.0, v = 0.0, w = 0.0;  // m/s
  double timestamp = 0.0;
};

struct NoiseConfig {
  double imu_attitude_sigma = 0.005;  // rad
  double imu_rate_sigma = 0.002;      // rad/s
  double imu_yaw_bias = 0.0;          // rad, magnetic disturbance offset
  double depth_sigma = 0.001;         // m, pre-quantization
  double dvl_sigma = 0.01;            // m/s
  double dropout_prob = 0.0;          // per read, IMU and DVL

  void validate() const {
    if (imu_attitude_sigma < 0 || imu_rate_sigma < 0 || depth_sigma < 0 ||
        dvl_sigma < 0)
      throw ValidationError("noise sigmas must be non-negative");
    if (dropout_prob < 0.0 || dropout_prob >= 1.0)
      throw ValidationError("dropout probability must be in [0,1)");
  }
};

/// Deterministic per-sensor noise stream, seeded from the master seed and
/// a sensor id so streams stay independent.
class SensorRng {
 public:
  SensorRng(std::uint64_t master_seed, std::uint64_t sensor_id)
      : engine_(master_seed * 0x9e3779b97f4a7c15ULL + sensor_id) {}

  double gaussian(double sigma) {
    if (sigma == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }

  bool dropout(double prob) {
    if (prob <= 0.0) return false;
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < prob;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::optional<ImuReading> imu_read(const Pose& pose,
                                          const BodyVelocity& nu,
                                          double t, const NoiseConfig& cfg,
                                          SensorRng& rng) {
  if (rng.dropout(cfg.dropout_prob)) return std::nullopt;
  ImuReading r;
  r.roll = wrap_angle(pose.phi + rng.gaussian(cfg.imu_attitude_sigma));
  r.pitch = pose.theta + rng.gaussian(cfg.imu_attitude_sigma);
  r.yaw = wrap_angle(pose.psi + cfg.imu_yaw_bias +
                     rng.gaussian(cfg.imu_attitude_sigma));
  r.p = nu.p + rng.gaussian(cfg.imu_rate_sigma);
  r.q = nu.q + rng.gaussian(cfg.imu_rate_sigma);
  r.r = nu.r + rng.gaussian(cfg.imu_rate_sigma);
  r.timestamp = t;
  return r;
}

/// Round-half-even quantization onto the 2 mm grid.
inline double quantize_depth(double z) {
  return std::nearbyint(z / kDepthResolution) * kDepthResolution;
}

inline DepthReading depth_read(double true_z, double t, const NoiseConfig& cfg,
                               SensorRng& rng) {
  DepthReading r;
  r.depth = quantize_depth(true_z + rng.gaussian(cfg.depth_sigma));
  r.timestamp = t;
  return r;
}

inline std::optional<DvlReading> dvl_read(const BodyVelocity& nu, double t,
                                          const NoiseConfig& cfg,
                                          SensorRng& rng) {
  if (rng.dropout(cfg.dropout_prob)) return std::nullopt;
  DvlReading r;
  r.u = nu.u + rng.gaussian(cfg.dvl_sigma);
  r.v = nu.v + rng.gaussian(cfg.dvl_sigma);
  r.w = nu.w + rng.gaussian(cfg.dvl_sigma);
  r.timestamp = t;
  return r;
}

}  // namespace anahita
