#pragma once

#include <Eigen/Dense>

#include "anahita/core.hpp"

namespace anahita {

/// 6x8 map from individual thruster forces to the body wrench.
/// Thrusters 1,2 act in surge, 3,4 in sway, 5-8 in heave.
class AllocationMatrix {
 public:
  explicit AllocationMatrix(const VehicleParams& p)
      : AllocationMatrix(p.l1, p.l2, p.l3, p.l4) {}

  AllocationMatrix(double l1, double l2, double l3, double l4) {
    if (l1 <= 0.0 || l2 <= 0.0 || l3 <= 0.0 || l4 <= 0.0) {
      throw ValidationError("allocation: lever arms must be positive");
    }
    b_.setZero();
    b_(0, 0) = 1.0;
    b_(0, 1) = 1.0;
    b_(1, 2) = 1.0;
    b_(1, 3) = 1.0;
    b_(2, 4) = 1.0;
    b_(2, 5) = 1.0;
    b_(2, 6) = 1.0;
    b_(2, 7) = 1.0;
    b_(3, 4) = l1;
    b_(3, 5) = l1;
    b_(3, 6) = -l1;
    b_(3, 7) = -l1;
    b_(4, 4) = -l2;
    b_(4, 5) = l2;
    b_(4, 6) = -l2;
    b_(4, 7) = l2;
    b_(5, 0) = -l3;
    b_(5, 1) = l3;
    b_(5, 2) = l4;
    b_(5, 3) = -l4;
    // Precompute the 6x6 Gram factorization used by allocate().
    Eigen::Matrix<double, 6, 6> gram = b_ * b_.transpose();
    gram_solver_ = gram.ldlt();
  }

  const Eigen::Matrix<double, 6, 8>& matrix() const { return b_; }

  GeneralizedForce forward(const ThrustVector& t) const {
    Eigen::Matrix<double, 8, 1> tv;
    for (int i = 0; i < 8; ++i) tv[i] = t[i];
    return GeneralizedForce::from_vec(b_ * tv);
  }

  struct Allocation {
    ThrustVector thrusts;
    double scale = 1.0;  // fraction of the requested wrench delivered
  };

  /// Minimum-norm inverse T = B^T (B B^T)^-1 tau. If any thruster would
  /// exceed t_max the wrench is scaled down uniformly.
  Allocation allocate(const GeneralizedForce& tau, double t_max) const {
    Eigen::Matrix<double, 6, 1> x = gram_solver_.solve(tau.vec());
    Eigen::Matrix<double, 8, 1> tv = b_.transpose() * x;
    Allocation out;
    double peak = tv.cwiseAbs().maxCoeff();
    if (peak > t_max) {
      out.scale = t_max / peak;
      tv *= out.scale;
    }
    for (int i = 0; i < 8; ++i) out.thrusts[i] = tv[i];
    return out;
  }

 private:
  Eigen::Matrix<double, 6, 8> b_;
  Eigen::LDLT<Eigen::Matrix<double, 6, 6>> gram_solver_;
};

}  // namespace anahita
