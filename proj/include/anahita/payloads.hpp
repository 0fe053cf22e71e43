#pragma once

#include <cmath>
#include <utility>

#include "anahita/core.hpp"
#include "anahita/dynamics.hpp"

namespace anahita {

inline constexpr double kWaterDensity = 1000.0;  // kg/m^3

enum class ProjectileKind { marker, torpedo };

struct Projectile {
  ProjectileKind kind = ProjectileKind::marker;
  Vec3 position{0, 0, 0};  // m, world NED
  Vec3 velocity{0, 0, 0};  // m/s, world
  double diameter = 0.045;  // m, golf-ball marker
  double mass = 0.046;      // kg
  double drag_coeff = 0.47;
  // Net of weight and buoyancy; positive z is down, so a sinking marker
  // carries a positive value and the buoyant torpedo a negative one.
  double net_force_z = 0.05;  // N

  double frontal_area() const {
    const double r = diameter / 2.0;
    return kPi * r * r;
  }
};

struct MarkerConfig {
  double mass = 0.046;
  double diameter = 0.045;
  double drag_coeff = 0.47;
  double net_force_z = 0.05;  // N, sinks
};

struct TorpedoConfig {
  double mass = 0.25;
  double diameter = 0.03;
  double drag_coeff = 0.10;
  double net_force_z = -0.1;  // N, positively buoyant
  double muzzle_speed = 3.0;  // m/s
};

struct DropperState {
  int balls_remaining = 2;
  double servo_angle = 0.0;  // rad
};

struct EmptyDropperError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One actuation releases exactly one ball; the ledge holds the second.
inline std::pair<DropperState, Projectile> drop(const DropperState& state,
                                                const Vec3& release_pos,
                                                const Vec3& release_vel,
                                                const MarkerConfig& cfg = {}) {
  if (state.balls_remaining <= 0) {
    throw EmptyDropperError("drop: no markers remaining");
  }
  DropperState next = state;
  next.balls_remaining -= 1;
  next.servo_angle += kPi / 2.0;

  Projectile p;
  p.kind = ProjectileKind::marker;
  p.position = release_pos;
  p.velocity = release_vel;
  p.diameter = cfg.diameter;
  p.mass = cfg.mass;
  p.drag_coeff = cfg.drag_coeff;
  p.net_force_z = cfg.net_force_z;
  return {next, p};
}

namespace detail {
inline Vec3 projectile_accel(const Projectile& p, const Vec3& v) {
  const double speed = v.norm();
  const Vec3 drag =
      -0.5 * kWaterDensity * p.drag_coeff * p.frontal_area() * speed * v;
  return (Vec3(0.0, 0.0, p.net_force_z) + drag) / p.mass;
}
}  // namespace detail

/// RK4 step of the point-mass model m v_dot = F_net - 0.5 rho Cd A |v| v.
inline Projectile projectile_step(const Projectile& p, double dt) {
  if (dt <= 0.0) throw ValidationError("projectile_step: dt must be positive");
  const Vec3 x0 = p.position, v0 = p.velocity;

  const Vec3 a1 = detail::projectile_accel(p, v0);
  const Vec3 v2 = v0 + dt / 2.0 * a1;
  const Vec3 a2 = detail::projectile_accel(p, v2);
  const Vec3 v3 = v0 + dt / 2.0 * a2;
  const Vec3 a3 = detail::projectile_accel(p, v3);
  const Vec3 v4 = v0 + dt * a3;
  const Vec3 a4 = detail::projectile_accel(p, v4);

  Projectile out = p;
  out.position = x0 + dt / 6.0 * (v0 + 2.0 * v2 + 2.0 * v3 + v4);
  out.velocity = v0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  return out;
}

inline double terminal_speed(const Projectile& p) {
  return std::sqrt(2.0 * std::abs(p.net_force_z) /
                   (kWaterDensity * p.drag_coeff * p.frontal_area()));
}

inline Projectile launch_torpedo(const VehicleState& vehicle,
                                 double muzzle_speed,
                                 const TorpedoConfig& cfg = {}) {
  if (muzzle_speed <= 0.0) {
    throw ValidationError("launch_torpedo: muzzle speed must be positive");
  }
  const Mat3 R = rotation_body_to_world(vehicle.pose);
  Projectile p;
  p.kind = ProjectileKind::torpedo;
  p.position = vehicle.pose.position();
  p.velocity = R * (vehicle.nu.linear() + Vec3(muzzle_speed, 0.0, 0.0));
  p.diameter = cfg.diameter;
  p.mass = cfg.mass;
  p.drag_coeff = cfg.drag_coeff;
  p.net_force_z = cfg.net_force_z;
  return p;
}

enum class GrabberFingers { open, closed };

struct GrabberState {
  double lift_extension = 0.0;  // m, 0..0.30 scissor travel
  GrabberFingers fingers = GrabberFingers::open;
  bool holding = false;
};

inline constexpr double kGrabberMaxExtension = 0.30;  // m
// Half the 120 mm maximum diagonal finger spread.
inline constexpr double kGrabRadius = 0.06;  // m

struct GrabberCommand {
  enum class Kind { extend, retract, open, close } kind;
  double extend_target = 0.0;  // m, extend only
};

/// Applies one grabber command. The actuation delay is handled by the
/// mission loop; this models the end state.
inline GrabberState grabber_command(const GrabberState& state,
                                    const GrabberCommand& cmd,
                                    double object_distance = 1e9) {
  GrabberState next = state;
  switch (cmd.kind) {
    case GrabberCommand::Kind::extend:
      if (cmd.extend_target < 0.0 || cmd.extend_target > kGrabberMaxExtension) {
        throw ValidationError("grabber: extension out of range");
      }
      next.lift_extension = cmd.extend_target;
      break;
    case GrabberCommand::Kind::retract:
      next.lift_extension = 0.0;
      break;
    case GrabberCommand::Kind::open:
      next.fingers = GrabberFingers::open;
      next.holding = false;
      break;
    case GrabberCommand::Kind::close:
      next.fingers = GrabberFingers::closed;
      next.holding = object_distance <= kGrabRadius;
      break;
  }
  return next;
}

}  // namespace anahita
