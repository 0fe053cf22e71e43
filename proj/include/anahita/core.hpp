#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace anahita {

inline constexpr double kGravity = 9.81;  // m/s^2
inline constexpr double kPi = 3.14159265358979323846;

// Pitch is fenced away from +/- pi/2 by this margin.
inline constexpr double kPitchMargin = 0.01;

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;  // already in range, keep it exact
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// World-frame pose, NED convention (z positive down), Z-Y-X Euler angles.
struct Pose {
  double x = 0.0, y = 0.0, z = 0.0;        // m
  double phi = 0.0, theta = 0.0, psi = 0.0;  // rad

  bool pitch_in_band() const {
    return theta > -kPi / 2.0 + kPitchMargin && theta < kPi / 2.0 - kPitchMargin;
  }

  void normalize() {
    phi = wrap_angle(phi);
    psi = wrap_angle(psi);
    if (!pitch_in_band()) {
      throw SingularityError("pitch angle " + std::to_string(theta) +
                             " outside the Euler singularity band");
    }
  }

  Vec3 position() const { return {x, y, z}; }
};

/// Body-frame velocity [u v w p q r].
struct BodyVelocity {
  double u = 0.0, v = 0.0, w = 0.0;  // m/s
  double p = 0.0, q = 0.0, r = 0.0;  // rad/s

  Vec3 linear() const { return {u, v, w}; }
  Vec3 angular() const { return {p, q, r}; }
  Vec6 vec() const { return (Vec6() << u, v, w, p, q, r).finished(); }

  static BodyVelocity from_vec(const Vec6& n) {
    return {n[0], n[1], n[2], n[3], n[4], n[5]};
  }
};

/// Six-axis wrench [tau_x tau_y tau_z tau_phi tau_theta tau_psi].
struct GeneralizedForce {
  double tau_x = 0.0, tau_y = 0.0, tau_z = 0.0;      // N
  double tau_phi = 0.0, tau_theta = 0.0, tau_psi = 0.0;  // N*m

  Vec6 vec() const {
    return (Vec6() << tau_x, tau_y, tau_z, tau_phi, tau_theta, tau_psi).finished();
  }

  static GeneralizedForce from_vec(const Vec6& t) {
    return {t[0], t[1], t[2], t[3], t[4], t[5]};
  }

  GeneralizedForce operator+(const GeneralizedForce& o) const {
    return from_vec(vec() + o.vec());
  }
};

/// Forces of the eight thrusters. Index 0 is thruster 1 (1,2 surge;
/// 3,4 sway; 5-8 heave).
struct ThrustVector {
  std::array<double, 8> t{};

  double& operator[](int i) { return t[static_cast<size_t>(i)]; }
  double operator[](int i) const { return t[static_cast<size_t>(i)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
  }
};

struct VehicleParams {
  double mass = 26.4;  // kg, dry mass before ballast
  double ballast_mass = 8.4;  // kg of dead weight, leaves +0.2 kg net buoyancy
  double inertia_xx = 1.5, inertia_yy = 1.5, inertia_zz = 1.5;  // kg*m^2
  double displaced_mass = 35.0;  // kg of water displaced
  Vec3 r_cg{0.0, 0.0, 0.0};      // m, body frame
  Vec3 r_cb{0.0, 0.0, -0.05};    // m, CB above CG (NED: negative z is up)
  std::array<double, 6> d_lin{0.0, 0.0, 0.0, 0.5, 0.5, 0.5};
  std::array<double, 6> d_quad{30.0, 66.89, 50.0, 5.0, 5.0, 5.0};
  double l1 = 0.25, l2 = 0.20, l3 = 0.30, l4 = 0.30;  // m
  double t_max = 20.0;  // N per thruster
  bool coriolis_enabled = false;

  double total_mass() const { return mass + ballast_mass; }
  double weight() const { return total_mass() * kGravity; }
  double buoyancy() const { return displaced_mass * kGravity; }

  void validate() const {
    if (total_mass() <= 0.0) throw ValidationError("mass must be positive");
    if (ballast_mass < 0.0) throw ValidationError("ballast_mass must be non-negative");
    if (inertia_xx <= 0.0 || inertia_yy <= 0.0 || inertia_zz <= 0.0)
      throw ValidationError("inertia diagonal must be positive");
    if (l1 <= 0.0 || l2 <= 0.0 || l3 <= 0.0 || l4 <= 0.0)
      throw ValidationError("lever arms l1..l4 must be positive");
    if (t_max <= 0.0) throw ValidationError("t_max must be positive");
    for (double d : d_lin)
      if (d < 0.0) throw ValidationError("linear damping must be non-negative");
    for (double d : d_quad)
      if (d < 0.0) throw ValidationError("quadratic damping must be non-negative");
  }
};

enum class Integrator { rk4, euler };

struct SimConfig {
  double dt = 0.01;       // s
  double duration = 60.0;  // s
  std::uint64_t seed = 0;
  Integrator integrator = Integrator::rk4;
  double velocity_limit_lin = 5.0;  // m/s divergence tripwire
  double velocity_limit_rot = 5.0;  // rad/s

  void validate() const {
    if (!(dt > 0.0 && dt <= 0.05))
      throw ValidationError("dt must be in (0, 0.05]");
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
  }
};

/// Body-to-world rotation for Z-Y-X Euler angles.
inline Mat3 rotation_body_to_world(const Pose& pose) {
  const double cphi = std::cos(pose.phi), sphi = std::sin(pose.phi);
  const double cth = std::cos(pose.theta), sth = std::sin(pose.theta);
  const double cpsi = std::cos(pose.psi), spsi = std::sin(pose.psi);
  Mat3 R;
  R << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
       spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
       -sth,       cth * sphi,                      cth * cphi;
  return R;
}

/// World-frame time derivative of a Pose.
struct PoseRate {
  double x_dot = 0.0, y_dot = 0.0, z_dot = 0.0;
  double phi_dot = 0.0, theta_dot = 0.0, psi_dot = 0.0;
};

/// Z-Y-X Euler kinematics: body velocity to world-frame pose rate.
inline PoseRate euler_kinematics(const Pose& pose, const BodyVelocity& nu) {
  if (!pose.pitch_in_band()) {
    throw SingularityError("euler_kinematics: pitch outside singularity band");
  }
  const Mat3 R = rotation_body_to_world(pose);
  const Vec3 v_world = R * nu.linear();

  const double cphi = std::cos(pose.phi), sphi = std::sin(pose.phi);
  const double cth = std::cos(pose.theta), tth = std::tan(pose.theta);

  PoseRate rate;
  rate.x_dot = v_world[0];
  rate.y_dot = v_world[1];
  rate.z_dot = v_world[2];
  rate.phi_dot = nu.p + sphi * tth * nu.q + cphi * tth * nu.r;
  rate.theta_dot = cphi * nu.q - sphi * nu.r;
  rate.psi_dot = sphi / cth * nu.q + cphi / cth * nu.r;
  return rate;
}

}  // namespace anahita
