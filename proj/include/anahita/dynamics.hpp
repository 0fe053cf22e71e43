#pragma once

#include <cmath>

#include "anahita/allocation.hpp"
#include "anahita/core.hpp"

namespace anahita {

struct VehicleState {
  Pose pose;
  BodyVelocity nu;
  double t = 0.0;  // s
};

/// Hydrostatic wrench in the body frame: weight at r_cg, buoyancy at r_cb.
/// Returned with the sign of a force acting on the vehicle (NED: tau_z
/// negative means net lift).
inline GeneralizedForce restoring_force(const Pose& pose,
                                        const VehicleParams& params) {
  const Mat3 Rt = rotation_body_to_world(pose).transpose();
  const Vec3 f_g = Rt * Vec3(0.0, 0.0, params.weight());
  const Vec3 f_b = Rt * Vec3(0.0, 0.0, -params.buoyancy());
  const Vec3 f = f_g + f_b;
  const Vec3 m = params.r_cg.cross(f_g) + params.r_cb.cross(f_b);
  return {f[0], f[1], f[2], m[0], m[1], m[2]};
}

/// Diagonal damping -(d_lin + d_quad*|nu_i|)*nu_i per axis.
inline GeneralizedForce damping_force(const BodyVelocity& nu,
                                      const VehicleParams& params) {
  const Vec6 n = nu.vec();
  Vec6 f;
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<size_t>(i);
    f[i] = -(params.d_lin[k] + params.d_quad[k] * std::abs(n[i])) * n[i];
  }
  return GeneralizedForce::from_vec(f);
}

/// Rigid-body Coriolis/centripetal contribution for diagonal M, returned
/// as a force on the right-hand side (i.e. -C(nu)nu). Zero unless enabled.
inline GeneralizedForce coriolis_force(const BodyVelocity& nu,
                                       const VehicleParams& params) {
  if (!params.coriolis_enabled) return {};
  const double m = params.total_mass();
  const Vec3 v = nu.linear();
  const Vec3 omega = nu.angular();
  const Vec3 Iw(params.inertia_xx * omega[0], params.inertia_yy * omega[1],
                params.inertia_zz * omega[2]);
  const Vec3 f = -m * omega.cross(v);
  const Vec3 mom = -omega.cross(Iw);
  return {f[0], f[1], f[2], mom[0], mom[1], mom[2]};
}

namespace detail {

struct StateDeriv {
  PoseRate pose_rate;
  Vec6 nu_dot;
};

inline StateDeriv derivative(const Pose& pose, const BodyVelocity& nu,
                             const GeneralizedForce& thrust_wrench,
                             const VehicleParams& params) {
  StateDeriv d;
  d.pose_rate = euler_kinematics(pose, nu);
  const Vec6 tau = thrust_wrench.vec() + restoring_force(pose, params).vec() +
                   damping_force(nu, params).vec() +
                   coriolis_force(nu, params).vec();
  const double m = params.total_mass();
  d.nu_dot[0] = tau[0] / m;
  d.nu_dot[1] = tau[1] / m;
  d.nu_dot[2] = tau[2] / m;
  d.nu_dot[3] = tau[3] / params.inertia_xx;
  d.nu_dot[4] = tau[4] / params.inertia_yy;
  d.nu_dot[5] = tau[5] / params.inertia_zz;
  return d;
}

inline void advance(Pose& pose, Vec6& nu, const PoseRate& pr,
                    const Vec6& nu_dot, double h) {
  pose.x += h * pr.x_dot;
  pose.y += h * pr.y_dot;
  pose.z += h * pr.z_dot;
  pose.phi += h * pr.phi_dot;
  pose.theta += h * pr.theta_dot;
  pose.psi += h * pr.psi_dot;
  nu += h * nu_dot;
}

}  // namespace detail

/// One fixed step of M nu_dot + C nu + D nu + g = tau.
inline VehicleState step(const VehicleState& state, const ThrustVector& thrusts,
                         const AllocationMatrix& alloc,
                         const VehicleParams& params, double dt,
                         Integrator integrator = Integrator::rk4,
                         double vel_limit_lin = 5.0,
                         double vel_limit_rot = 5.0) {
  const GeneralizedForce tau_thrust = alloc.forward(thrusts);

  VehicleState next = state;
  const Vec6 nu0 = state.nu.vec();

  if (integrator == Integrator::euler) {
    auto d = detail::derivative(state.pose, state.nu, tau_thrust, params);
    Vec6 nu = nu0;
    detail::advance(next.pose, nu, d.pose_rate, d.nu_dot, dt);
    next.nu = BodyVelocity::from_vec(nu);
  } else {
    // Classic RK4 on the combined (pose, nu) state.
    auto k1 = detail::derivative(state.pose, state.nu, tau_thrust, params);

    Pose p2 = state.pose;
    Vec6 n2 = nu0;
    detail::advance(p2, n2, k1.pose_rate, k1.nu_dot, dt / 2.0);
    auto k2 = detail::derivative(p2, BodyVelocity::from_vec(n2), tau_thrust, params);

    Pose p3 = state.pose;
    Vec6 n3 = nu0;
    detail::advance(p3, n3, k2.pose_rate, k2.nu_dot, dt / 2.0);
    auto k3 = detail::derivative(p3, BodyVelocity::from_vec(n3), tau_thrust, params);

    Pose p4 = state.pose;
    Vec6 n4 = nu0;
    detail::advance(p4, n4, k3.pose_rate, k3.nu_dot, dt);
    auto k4 = detail::derivative(p4, BodyVelocity::from_vec(n4), tau_thrust, params);

    PoseRate pr;
    pr.x_dot = (k1.pose_rate.x_dot + 2 * k2.pose_rate.x_dot + 2 * k3.pose_rate.x_dot + k4.pose_rate.x_dot) / 6.0;
    pr.y_dot = (k1.pose_rate.y_dot + 2 * k2.pose_rate.y_dot + 2 * k3.pose_rate.y_dot + k4.pose_rate.y_dot) / 6.0;
    pr.z_dot = (k1.pose_rate.z_dot + 2 * k2.pose_rate.z_dot + 2 * k3.pose_rate.z_dot + k4.pose_rate.z_dot) / 6.0;
    pr.phi_dot = (k1.pose_rate.phi_dot + 2 * k2.pose_rate.phi_dot + 2 * k3.pose_rate.phi_dot + k4.pose_rate.phi_dot) / 6.0;
    pr.theta_dot = (k1.pose_rate.theta_dot + 2 * k2.pose_rate.theta_dot + 2 * k3.pose_rate.theta_dot + k4.pose_rate.theta_dot) / 6.0;
    pr.psi_dot = (k1.pose_rate.psi_dot + 2 * k2.pose_rate.psi_dot + 2 * k3.pose_rate.psi_dot + k4.pose_rate.psi_dot) / 6.0;
    const Vec6 nd = (k1.nu_dot + 2 * k2.nu_dot + 2 * k3.nu_dot + k4.nu_dot) / 6.0;

    Vec6 nu = nu0;
    detail::advance(next.pose, nu, pr, nd, dt);
    next.nu = BodyVelocity::from_vec(nu);
  }

  next.pose.normalize();
  next.t = state.t + dt;

  const Vec6 n = next.nu.vec();
  for (int i = 0; i < 6; ++i) {
    const double limit = i < 3 ? vel_limit_lin : vel_limit_rot;
    if (!std::isfinite(n[i]) || std::abs(n[i]) > limit) {
      throw DivergenceError("velocity tripwire exceeded on axis " +
                            std::to_string(i) + " at t=" +
                            std::to_string(next.t));
    }
  }
  return next;
}

}  // namespace anahita
