#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "anahita/control.hpp"
#include "anahita/dynamics.hpp"
#include "anahita/sensors.hpp"

using namespace anahita;
using Catch::Approx;

TEST_CASE("pid with zero error stays quiet") {
  PidGains g{2.0, 1.0, 0.5, -10, 10, -1, 1};
  PidState s;
  for (int i = 0; i < 50; ++i) CHECK(pid_step(g, s, 0.0, 0.1) == 0.0);
}

TEST_CASE("proportional only") {
  PidGains g{2.0, 0.0, 0.0, -10, 10, -1, 1};
  PidState s;
  CHECK(pid_step(g, s, 1.5, 0.1) == Approx(3.0));
}

TEST_CASE("pi sequence matches a hand-rolled accumulator") {
  PidGains g{1.0, 0.5, 0.0, -100, 100, -100, 100};
  PidState s;
  double acc = 0.0;
  for (int i = 0; i < 10; ++i) {
    acc += 1.0 * 0.1;
    const double expect = 1.0 * 1.0 + 0.5 * acc;
    CHECK(pid_step(g, s, 1.0, 0.1) == Approx(expect).margin(1e-12));
  }
}

TEST_CASE("derivative uses backward difference, zero on first call") {
  PidGains g{0.0, 0.0, 2.0, -100, 100, -1, 1};
  PidState s;
  CHECK(pid_step(g, s, 5.0, 0.1) == Approx(0.0));  // no prior error
  CHECK(pid_step(g, s, 6.0, 0.1) == Approx(2.0 * (6.0 - 5.0) / 0.1));
}

TEST_CASE("integral clamp holds for any error sequence") {
  PidGains g{0.0, 1.0, 0.0, -100, 100, -0.5, 0.5};
  PidState s;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    pid_step(g, s, e(rng), 0.1);
    CHECK(s.integral >= -0.5);
    CHECK(s.integral <= 0.5);
  }
}

TEST_CASE("output clamping") {
  PidGains g{10.0, 0.0, 0.0, -4.0, 4.0, -1, 1};
  PidState s;
  CHECK(pid_step(g, s, 100.0, 0.1) == Approx(4.0));
  CHECK(pid_step(g, s, -100.0, 0.1) == Approx(-4.0));
}

TEST_CASE("errors at the goal are zero") {
  Pose p;
  p.x = 1.0;
  p.psi = 0.4;
  MotionGoal g = MotionGoal::hold_pose(p);
  const auto err = compute_errors(p, BodyVelocity{}, g);
  for (double e : err) CHECK(e == Approx(0.0).margin(1e-12));
}

TEST_CASE("yaw error takes the shortest path through pi") {
  Pose p;
  p.psi = 3.0;
  MotionGoal g;
  g.set(Axis::yaw, -3.0);
  const auto err = compute_errors(p, BodyVelocity{}, g);
  CHECK(err[5] == Approx(2.0 * kPi - 6.0).margin(1e-12));
  CHECK(err[5] == Approx(0.2832).margin(1e-4));
}

TEST_CASE("position error is expressed in the body frame") {
  Pose p;
  p.psi = kPi / 2.0;
  MotionGoal g = MotionGoal::hold_pose(p);
  g.set(Axis::surge, p.x);
  g.set(Axis::sway, p.y + 1.0);  // 1 m ahead of the yawed vehicle
  const auto err = compute_errors(p, BodyVelocity{}, g);
  CHECK(err[0] == Approx(1.0).margin(1e-12));
  CHECK(err[1] == Approx(0.0).margin(1e-12));
}

TEST_CASE("yaw error always within pi") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(-3.1, 3.1);
  for (int i = 0; i < 500; ++i) {
    Pose p;
    p.psi = a(rng);
    MotionGoal g;
    g.set(Axis::yaw, a(rng));
    const auto err = compute_errors(p, BodyVelocity{}, g);
    CHECK(std::abs(err[5]) <= kPi);
  }
}

TEST_CASE("control step is quiet at the goal and loops are independent") {
  const auto gains = ControllerGains::defaults();
  ControllerState states{};
  Pose p;
  p.z = 2.0;
  const auto quiet = control_step(MotionGoal::hold_pose(p), gains, states, p,
                                  BodyVelocity{}, 0.01);
  CHECK(quiet.vec().cwiseAbs().maxCoeff() == 0.0);

  // depth error only -> only tau_z
  ControllerState states2{};
  MotionGoal g = MotionGoal::hold_pose(p);
  g.set(Axis::heave, p.z + 1.0);
  const auto wrench = control_step(g, gains, states2, p, BodyVelocity{}, 0.01);
  CHECK(wrench.tau_z != 0.0);
  CHECK(wrench.tau_x == Approx(0.0).margin(1e-15));
  CHECK(wrench.tau_y == Approx(0.0).margin(1e-15));
  CHECK(wrench.tau_psi == Approx(0.0).margin(1e-15));
}

TEST_CASE("closed-loop depth step settles") {
  VehicleParams params;
  const AllocationMatrix alloc(params);
  const auto gains = ControllerGains::defaults(params.t_max);
  ControllerState states{};
  SensorRng rng(0, 2);
  NoiseConfig noise;
  noise.depth_sigma = 0.0;

  VehicleState s;
  MotionGoal goal;
  goal.set(Axis::heave, 2.0);

  double worst_tail_error = 0.0;
  const int steps = 6000;  // 60 s at dt = 0.01
  for (int i = 0; i < steps; ++i) {
    const auto depth = depth_read(s.pose.z, s.t, noise, rng);
    Pose sensed = s.pose;
    sensed.z = depth.depth;
    const auto wrench = control_step(goal, gains, states, sensed, s.nu, 0.01);
    const auto t = alloc.allocate(wrench, params.t_max).thrusts;
    s = step(s, t, alloc, params, 0.01);
    if (i >= steps - 1000) {
      worst_tail_error = std::max(worst_tail_error, std::abs(s.pose.z - 2.0));
    }
  }
  CHECK(worst_tail_error <= 0.005);
}
