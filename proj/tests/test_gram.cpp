#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "nblab/beurling.hpp"
#include "nblab/errors.hpp"
#include "nblab/gram.hpp"
#include "oracles.hpp"

using namespace nblab;

namespace {

std::vector<double> bd_thetas(int n) {
  std::vector<double> t;
  for (int k = 1; k <= n; ++k) t.push_back(1.0 / k);
  return t;
}

// d_n^2 as a quotient of Gram determinants, det G(chi, phi_1..phi_n) / det G(phi_1..phi_n).
double determinant_distance(const GramSystem& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd aug(n + 1, n + 1);
  aug(0, 0) = s.target_norm_sq;
  aug.block(1, 0, n, 1) = s.b;
  aug.block(0, 1, 1, n) = s.b.transpose();
  aug.block(1, 1, n, n) = s.g;
  return aug.fullPivLu().determinant() / s.g.fullPivLu().determinant();
}

}  // namespace

TEST_CASE("d_1^2 = 1 - (1 - gamma)^2 / K") {
  const auto sys = assemble_deterministic(bd_thetas(1));
  const auto r = solve(sys);
  const double expected = 1 - std::pow(1 - oracle::kGamma, 2) / oracle::k_constant();
  CHECK(r.distance_sq == doctest::Approx(expected).epsilon(1e-9));
  CHECK(r.distance_sq == doctest::Approx(0.858213).epsilon(2e-6));
  CHECK(r.coeffs(0) == doctest::Approx((1 - oracle::kGamma) / oracle::k_constant()).epsilon(1e-9));
}

TEST_CASE("solve agrees with the determinant quotient for n <= 5") {
  for (int n = 1; n <= 5; ++n) {
    const auto sys = assemble_deterministic(bd_thetas(n), 1e-7);
    const auto r = solve(sys);
    CHECK(r.distance_sq == doctest::Approx(determinant_distance(sys)).epsilon(1e-7));
    CHECK(r.dropped_modes == 0);
  }
}

TEST_CASE("Gram entries match independent formulas") {
  const auto sys = assemble_deterministic(bd_thetas(3), 1e-7);
  for (int k = 0; k < 3; ++k) {
    CHECK(sys.g(k, k) == doctest::Approx(oracle::k_constant() / (k + 1)).epsilon(1e-8));
    CHECK(sys.b(k) == doctest::Approx(oracle::chi_rho_small(1.0 / (k + 1))).epsilon(1e-8));
  }
  CHECK(sys.target_norm_sq == 1.0);
  const auto o = oracle::inner_rho_rho(1.0, 0.5, 2e6);
  CHECK(std::abs(sys.g(0, 1) - o.value) <= sys.entry_err(0, 1) + o.tail_uncertainty);
  CHECK(sys.g(0, 1) == sys.g(1, 0));
}

TEST_CASE("d_n^2 is nonincreasing within the certified slack") {
  const int n_max = 16;
  const auto full = assemble_deterministic(bd_thetas(n_max));
  double prev = 2;
  for (int n = 1; n <= n_max; ++n) {
    GramSystem sub;
    sub.g = full.g.topLeftCorner(n, n);
    sub.entry_err = full.entry_err.topLeftCorner(n, n);
    sub.b = full.b.head(n);
    sub.rhs_err = full.rhs_err.head(n);
    const auto r = solve(sub);
    CHECK(r.distance_sq <= prev + r.certified_slack);
    CHECK(r.distance_sq >= -r.certified_slack);
    prev = r.distance_sq;
  }
}

TEST_CASE("residual_with_coeffs reproduces the projection distance") {
  const auto sys = assemble_deterministic(bd_thetas(4));
  const auto r = solve(sys);
  CHECK(residual_with_coeffs(sys, r.coeffs) == doctest::Approx(r.distance_sq).epsilon(1e-9));
  CHECK(residual_with_coeffs(sys, Eigen::VectorXd::Zero(4)) == doctest::Approx(1.0));
  // Any other coefficients do worse.
  Eigen::VectorXd c = r.coeffs;
  c(2) += 0.05;
  CHECK(residual_with_coeffs(sys, c) > r.distance_sq);
  CHECK(residual_slack(sys, r.coeffs) > 0);
}

TEST_CASE("duplicate dilations are dropped by the eigenvalue cutoff") {
  const auto single = solve(assemble_deterministic(std::vector<double>{0.5}));
  const auto dup = solve(assemble_deterministic(std::vector<double>{0.5, 0.5}));
  CHECK(dup.dropped_modes == 1);
  CHECK(dup.distance_sq == doctest::Approx(single.distance_sq).epsilon(1e-9));
}

TEST_CASE("validate rejects malformed systems") {
  auto sys = assemble_deterministic(bd_thetas(2));
  sys.g(0, 1) += 0.1;
  CHECK_THROWS_AS(sys.validate(), DataError);
  sys = assemble_deterministic(bd_thetas(2));
  sys.b(1) = NAN;
  CHECK_THROWS_AS(sys.validate(), DataError);
  sys = assemble_deterministic(bd_thetas(2));
  sys.g(1, 1) = 0;
  CHECK_THROWS_AS(sys.validate(), DataError);
}

TEST_CASE("assembly does not depend on the thread count") {
  const auto a = assemble_deterministic(bd_thetas(8), 1e-6, 1);
  const auto b = assemble_deterministic(bd_thetas(8), 1e-6, 3);
  CHECK((a.g.array() == b.g.array()).all());
  CHECK((a.b.array() == b.b.array()).all());
}
