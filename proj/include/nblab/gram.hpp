#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nblab/beurling.hpp"

namespace nblab {

inline constexpr double kDefaultEigenCutoff = 1e-12;

/// Normal equations of a least-squares projection in L^2(0, inf).
struct GramSystem {
  Eigen::MatrixXd g;          // <phi_k, phi_l>
  Eigen::VectorXd b;          // <target, phi_k>
  double target_norm_sq = 1;  // ||target||^2
  double target_err = 0;      // certified bound on the error of target_norm_sq
  Eigen::MatrixXd entry_err;  // certified bounds on the errors of g
  Eigen::VectorXd rhs_err;    // certified bounds on the errors of b
  std::vector<std::string> labels;

  std::size_t size() const { return static_cast<std::size_t>(b.size()); }

  /// Throws DataError on shape mismatch, asymmetry, non-finite entries,
  /// non-positive diagonal or non-positive target norm.
  void validate() const;
};

struct DistanceReport {
  Eigen::VectorXd coeffs;
  double distance_sq = 0;
  double reg_cutoff = 0;
  std::size_t dropped_modes = 0;
  double condition_estimate = 0;  // largest / smallest retained eigenvalue
  double certified_slack = 0;
  bool clamped = false;           // distance_sq was negative and has been set to 0
  double raw_distance_sq = 0;     // value before clamping
};

/// Gram system of rho_theta for the given dilations against chi.
GramSystem assemble_deterministic(std::span<const double> thetas, double tol = kDefaultInnerTol,
                                  unsigned threads = 1);

/// Orthogonal projection of the target onto span{phi_k}.
///
/// Uses a symmetric eigendecomposition and discards modes whose eigenvalue is
/// at most cutoff * (largest eigenvalue); the coefficients are the
/// pseudo-inverse solution on the retained modes.
DistanceReport solve(const GramSystem& sys, double cutoff = kDefaultEigenCutoff);

/// ||target - sum_k c_k phi_k||^2 = target_norm_sq - 2 b.c + c.G.c
double residual_with_coeffs(const GramSystem& sys, const Eigen::VectorXd& coeffs);

/// First-order bound on the error of residual_with_coeffs coming from the
/// certified entry errors: ||c||_1^2 max|dG| + 2 ||c||_1 max|db| + |d target|.
double residual_slack(const GramSystem& sys, const Eigen::VectorXd& coeffs);

}  // namespace nblab
