#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "anahita/core.hpp"

namespace anahita {

enum class Axis { surge = 0, sway = 1, heave = 2, roll = 3, pitch = 4, yaw = 5 };

struct PidGains {
  double kp = 0.0, ki = 0.0, kd = 0.0;
  double out_min = -1e9, out_max = 1e9;
  double i_min = -1e9, i_max = 1e9;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool initialized = false;
};

/// One discrete PID update. Backward-difference derivative on the error,
/// anti-windup by integral clamping, zero derivative on the first call.
inline double pid_step(const PidGains& gains, PidState& state, double error,
                       double dt) {
  state.integral = std::clamp(state.integral + error * dt, gains.i_min, gains.i_max);
  double deriv = 0.0;
  if (state.initialized) deriv = (error - state.prev_error) / dt;
  state.prev_error = error;
  state.initialized = true;
  const double out = gains.kp * error + gains.ki * state.integral + gains.kd * deriv;
  return std::clamp(out, gains.out_min, gains.out_max);
}

/// Per-axis setpoints with enable switches. Position setpoints are world
/// frame; attitude setpoints are absolute angles.
struct MotionGoal {
  std::array<bool, 6> enabled{};    // surge, sway, heave, roll, pitch, yaw
  std::array<double, 6> setpoint{};  // x, y, z, phi, theta, psi targets

  static MotionGoal hold_pose(const Pose& p) {
    MotionGoal g;
    g.enabled = {true, true, true, true, true, true};
    g.setpoint = {p.x, p.y, p.z, p.phi, p.theta, p.psi};
    return g;
  }

  void set(Axis a, double value) {
    enabled[static_cast<size_t>(a)] = true;
    setpoint[static_cast<size_t>(a)] = value;
  }
};

/// Errors for the six loops. Position errors are rotated into the body
/// frame so surge/sway/heave loops drive body axes; attitude errors take
/// the shortest signed angular difference.
inline std::array<double, 6> compute_errors(const Pose& current,
                                            const BodyVelocity& /*nu*/,
                                            const MotionGoal& goal) {
  std::array<double, 6> err{};
  const Vec3 dp_world(goal.enabled[0] ? goal.setpoint[0] - current.x : 0.0,
                      goal.enabled[1] ? goal.setpoint[1] - current.y : 0.0,
                      goal.enabled[2] ? goal.setpoint[2] - current.z : 0.0);
  const Vec3 dp_body = rotation_body_to_world(current).transpose() * dp_world;
  err[0] = goal.enabled[0] || goal.enabled[1] || goal.enabled[2] ? dp_body[0] : 0.0;
  err[1] = goal.enabled[0] || goal.enabled[1] || goal.enabled[2] ? dp_body[1] : 0.0;
  err[2] = goal.enabled[0] || goal.enabled[1] || goal.enabled[2] ? dp_body[2] : 0.0;
  if (goal.enabled[3]) err[3] = wrap_angle(goal.setpoint[3] - current.phi);
  if (goal.enabled[4]) err[4] = wrap_angle(goal.setpoint[4] - current.theta);
  if (goal.enabled[5]) err[5] = wrap_angle(goal.setpoint[5] - current.psi);
  return err;
}

struct ControllerGains {
  std::array<PidGains, 6> axis;

  static ControllerGains defaults(double t_max = 20.0) {
    ControllerGains g;
    const double f_lim = 2.0 * t_max;   // two thrusters per translational axis
    const double m_lim = 4.0 * t_max * 0.3;  // coarse moment bound
    g.axis[0] = {40.0, 2.0, 30.0, -f_lim, f_lim, -3.0, 3.0};   // surge
    g.axis[1] = {40.0, 2.0, 30.0, -f_lim, f_lim, -3.0, 3.0};   // sway
    g.axis[2] = {120.0, 10.0, 60.0, -2.0 * f_lim, 2.0 * f_lim, -3.0, 3.0};  // heave
    g.axis[3] = {10.0, 0.5, 5.0, -m_lim, m_lim, -2.0, 2.0};    // roll
    g.axis[4] = {10.0, 0.5, 5.0, -m_lim, m_lim, -2.0, 2.0};    // pitch
    g.axis[5] = {8.0, 0.5, 4.0, -m_lim, m_lim, -2.0, 2.0};     // yaw
    return g;
  }
};

using ControllerState = std::array<PidState, 6>;

/// Runs the six loops in one call and assembles the commanded wrench.
inline GeneralizedForce control_step(const MotionGoal& goal,
                                     const ControllerGains& gains,
                                     ControllerState& states, const Pose& pose,
                                     const BodyVelocity& nu, double dt) {
  const auto err = compute_errors(pose, nu, goal);
  Vec6 tau = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<size_t>(i);
    tau[i] = pid_step(gains.axis[k], states[k], err[k], dt);
  }
  return GeneralizedForce::from_vec(tau);
}

}  // namespace anahita
