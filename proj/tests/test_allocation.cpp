#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <Eigen/Dense>

#include "anahita/allocation.hpp"

using namespace anahita;
using Catch::Approx;

namespace {

AllocationMatrix default_matrix() { return AllocationMatrix(0.25, 0.20, 0.30, 0.30); }

// Dense least-squares oracle, independent of the LDLT route used by
// allocate(): min-norm solution via SVD pseudo-inverse.
Eigen::Matrix<double, 8, 1> min_norm_oracle(const Eigen::Matrix<double, 6, 8>& B,
                                            const Vec6& tau) {
  return B.bdcSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(tau);
}

}  // namespace

TEST_CASE("matrix rows follow the thruster layout") {
  const auto m = AllocationMatrix(0.25, 0.20, 0.30, 0.30).matrix();
  // surge row: thrusters 1,2
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m.row(0).tail<6>().isZero());
  // sway row: thrusters 3,4
  CHECK(m(1, 2) == 1.0);
  CHECK(m(1, 3) == 1.0);
  // heave row: thrusters 5-8
  for (int i = 4; i < 8; ++i) CHECK(m(2, i) == 1.0);
  // roll: (l1, l1, -l1, -l1) on 5-8
  CHECK(m(3, 4) == Approx(0.25));
  CHECK(m(3, 5) == Approx(0.25));
  CHECK(m(3, 6) == Approx(-0.25));
  CHECK(m(3, 7) == Approx(-0.25));
  // pitch: (-l2, l2, -l2, l2) on 5-8
  CHECK(m(4, 4) == Approx(-0.20));
  CHECK(m(4, 5) == Approx(0.20));
  CHECK(m(4, 6) == Approx(-0.20));
  CHECK(m(4, 7) == Approx(0.20));
  // yaw: (-l3, l3) on 1,2 and (l4, -l4) on 3,4
  CHECK(m(5, 0) == Approx(-0.30));
  CHECK(m(5, 1) == Approx(0.30));
  CHECK(m(5, 2) == Approx(0.30));
  CHECK(m(5, 3) == Approx(-0.30));
  // full row rank
  CHECK(Eigen::FullPivLU<Eigen::Matrix<double, 6, 8>>(m).rank() == 6);
}

TEST_CASE("forward map basics") {
  const auto m = default_matrix();
  CHECK(m.forward(ThrustVector{}).vec().isZero());

  ThrustVector heave{};
  for (int i = 4; i < 8; ++i) heave[i] = 1.0;
  const auto tau = m.forward(heave);
  CHECK(tau.tau_z == Approx(4.0));
  CHECK(tau.tau_phi == Approx(0.0).margin(1e-15));
  CHECK(tau.tau_theta == Approx(0.0).margin(1e-15));

  ThrustVector yawed{};
  yawed[0] = 1.0;
  yawed[1] = -1.0;
  const auto tau2 = m.forward(yawed);
  CHECK(tau2.tau_psi == Approx(-0.6));
  CHECK(tau2.tau_x == Approx(0.0).margin(1e-15));
}

TEST_CASE("zero lever arm is rejected") {
  CHECK_THROWS_AS(AllocationMatrix(0.25, 0.0, 0.3, 0.3), ValidationError);
}

TEST_CASE("pure surge splits symmetrically") {
  const auto m = default_matrix();
  GeneralizedForce tau;
  tau.tau_x = 2.0;
  const auto res = m.allocate(tau, 20.0);
  CHECK(res.scale == 1.0);
  CHECK(res.thrusts[0] == Approx(1.0));
  CHECK(res.thrusts[1] == Approx(1.0));
  for (int i = 2; i < 8; ++i) CHECK(res.thrusts[i] == Approx(0.0).margin(1e-12));
}

TEST_CASE("round trip and min-norm property on random wrenches") {
  const auto m = default_matrix();
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> f(-10.0, 10.0);
  std::uniform_real_distribution<double> mom(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    GeneralizedForce tau{f(rng), f(rng), f(rng), mom(rng), mom(rng), mom(rng)};
    const auto res = m.allocate(tau, 1e9);
    REQUIRE(res.scale == 1.0);
    const auto back = m.forward(res.thrusts);
    CHECK((back.vec() - tau.vec()).cwiseAbs().maxCoeff() < 1e-9);

    const auto oracle = min_norm_oracle(m.matrix(), tau.vec());
    for (int k = 0; k < 8; ++k)
      CHECK(res.thrusts[k] == Approx(oracle[k]).margin(1e-8));
  }
}

TEST_CASE("saturation scales the wrench uniformly") {
  const auto m = default_matrix();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> f(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    GeneralizedForce tau{f(rng), f(rng), f(rng), f(rng) / 5, f(rng) / 5, f(rng) / 5};
    const auto res = m.allocate(tau, 20.0);
    CHECK(res.scale > 0.0);
    CHECK(res.scale <= 1.0);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(res.thrusts[k]) <= 20.0 + 1e-12);
    const auto back = m.forward(res.thrusts);
    CHECK((back.vec() - res.scale * tau.vec()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("pure heave never produces surge or sway thrust") {
  const auto m = default_matrix();
  for (double tz : {-40.0, -5.0, 3.0, 55.0}) {
    GeneralizedForce tau;
    tau.tau_z = tz;
    const auto res = m.allocate(tau, 20.0);
    for (int k = 0; k < 4; ++k)
      CHECK(res.thrusts[k] == Approx(0.0).margin(1e-12));
  }
}
