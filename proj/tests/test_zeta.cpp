#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "nblab/basis.hpp"
#include "nblab/criteria.hpp"
#include "nblab/distribution.hpp"
#include "nblab/errors.hpp"
#include "nblab/gram.hpp"
#include "nblab/special.hpp"
#include "nblab/zeta.hpp"
#include "oracles.hpp"

using namespace nblab;

TEST_CASE("zeta against an independent Euler-Maclaurin sum") {
  for (double sigma : {0.25, 0.5, 0.9, 1.5, 2.0})
    for (double t : {0.0, 0.5, 3.0, 14.1, 27.5, 49.0}) {
      if (sigma == 1.0 && t == 0.0) continue;
      const cplx s{sigma, t};
      INFO("s = " << sigma << " + " << t << "i");
      CHECK(std::abs(zeta_eval(s) - oracle::zeta_em(s)) <= 1e-11 * std::max(1.0, std::abs(oracle::zeta_em(s))));
    }
}

TEST_CASE("special values") {
  CHECK(std::abs(zeta_eval({2, 0}) - cplx(oracle::kPi * oracle::kPi / 6)) <= 1e-10);
  CHECK(zeta_eval({0.5, 0}).real() == doctest::Approx(-1.4603545088095868).epsilon(1e-12));
  CHECK_THROWS_AS(zeta_eval({1, 0}), PoleError);
  CHECK_THROWS_AS(zeta_eval({0.5, 2e4}), DomainError);
  CHECK_THROWS_AS(zeta_eval({2.5, 0}), DomainError);
}

TEST_CASE("the two internal methods agree up to height 50") {
  for (double t = 0; t <= 50; t += 0.37) {
    const auto z = zeta_eval_detail({0.5, t});
    CHECK(z.cross_checked);
    CHECK(z.method_gap <= kZetaAgreementTol);
    CHECK_FALSE(z.degraded);
  }
  const auto high = zeta_eval_detail({0.5, 300});
  CHECK(high.degraded);
  CHECK_FALSE(high.cross_checked);
}

TEST_CASE("conjugate symmetry") {
  for (double t : {1.0, 20.0, 700.0}) {
    const auto a = zeta_eval({0.5, t}), b = zeta_eval({0.5, -t});
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("Euler-Maclaurin at larger heights matches the alternating series") {
  for (double t : {200.0, 1000.0}) {
    const cplx s{0.5, t};
    const auto em = zeta_euler_maclaurin(s, static_cast<std::size_t>(t) + 30, 20);
    CHECK(std::abs(em - zeta_eval(s)) <= 1e-9);
  }
}

TEST_CASE("log_gamma") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 10.0, 150.0}) CHECK(log_gamma({x, 0}).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  for (cplx z : {cplx(0.3, 2.0), cplx(2.0, -7.0), cplx(0.25, 40.0)}) {
    // Recurrence log Gamma(z + 1) = log Gamma(z) + log z on the continuous branch.
    const auto d = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
    CHECK(std::abs(d) <= 1e-12 * std::max(1.0, std::abs(log_gamma(z))));
  }
  // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
  for (double t : {0.5, 3.0, 9.0}) {
    const double lhs = 2 * log_gamma({0.5, t}).real();
    CHECK(lhs == doctest::Approx(std::log(oracle::kPi / std::cosh(oracle::kPi * t))).epsilon(1e-12));
  }
}

TEST_CASE("Siegel theta and Hardy Z") {
  for (double t : {2.0, 9.5, 10.5, 40.0, 500.0}) {
    const double direct = log_gamma({0.25, t / 2}).imag() - t / 2 * std::log(oracle::kPi);
    CHECK(std::remainder(siegel_theta(t) - direct, 2 * oracle::kPi) == doctest::Approx(0.0).epsilon(1e-9).scale(1));
    const auto rotated = std::polar(1.0, siegel_theta(t)) * zeta_eval({0.5, t});
    CHECK(std::abs(rotated.imag()) <= 1e-10 * std::max(1.0, std::abs(rotated)));
    CHECK(hardy_z(t) == doctest::Approx(rotated.real()).epsilon(1e-10));
  }
}

TEST_CASE("zeros of Z on (0, 50]") {
  CHECK(bracket_zero(14, 14.3) == doctest::Approx(14.134725141734693).epsilon(1e-10));
  int sign_changes = 0;
  double prev = hardy_z(0.5);
  for (double t = 0.55; t <= 50; t += 0.05) {
    const double z = hardy_z(t);
    if ((z > 0) != (prev > 0)) ++sign_changes;
    prev = z;
  }
  CHECK(sign_changes == 10);
  CHECK_THROWS_AS(bracket_zero(15, 16), DomainError);
}

TEST_CASE("critical line grid build, save and load") {
  const auto g = CriticalLineGrid::build(30, 0.1, 0.01, 1.0, 2);
  CHECK(g.t.front() == 0.0);
  CHECK(g.t.back() == doctest::Approx(30));
  CHECK(g.max_method_gap <= kZetaAgreementTol);
  for (std::size_t i = 0; i < g.t.size(); i += 37) CHECK(g.zeta[i] == zeta_eval({0.5, g.t[i]}));
  const std::string path = "zeta_grid_test.csv";
  g.save_csv(path);
  const auto h = CriticalLineGrid::load_csv(path);
  REQUIRE(h.t.size() == g.t.size());
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    CHECK(h.t[i] == g.t[i]);
    CHECK(h.zeta[i] == g.zeta[i]);
  }
  const auto c = CriticalLineGrid::cached(path, 30, 0.1, 0.01, 1.0, 1);
  CHECK(c.t.size() == g.t.size());
  std::remove(path.c_str());
  CHECK_THROWS_AS(CriticalLineGrid::load_csv("missing_grid.csv"), IoError);
}

TEST_CASE("Plancherel value matches the time-domain residual") {
  const auto grid = CriticalLineGrid::build(300, 0.05, 0.005, 2.0, 1);
  for (int n : {1, 2}) {
    BasisSpec b;
    for (int k = 1; k <= n; ++k) b.elements.push_back(Distribution::point_mass(1.0 / k));
    std::vector<double> thetas;
    for (int k = 1; k <= n; ++k) thetas.push_back(1.0 / k);
    const auto sys = assemble_deterministic(thetas);
    const auto r = solve(sys);
    const std::vector<double> c(r.coeffs.data(), r.coeffs.data() + n);
    const auto p = plancherel_residual(b, c, grid);
    INFO("n = " << n);
    CHECK(p.tail_bound > 0);
    CHECK(std::abs(p.value - r.distance_sq) <= 1e-2 + p.tail_bound);
  }
  // Empty combination: the Mellin image of chi is 1/s, so the value is ||chi||^2 minus the tail.
  BasisSpec one;
  one.elements.push_back(Distribution::point_mass(1.0));
  const auto empty = plancherel_residual(one, {0.0}, grid);
  const double tail = 2 * (0.5 * oracle::kPi - std::atan(2 * 300.0)) / oracle::kPi;
  // Trapezoid error on 1/(1/4 + t^2) is about (step^2 / 12) |f'(2)| / pi = 1.5e-5 here.
  CHECK(std::abs(empty.value - (1.0 - tail)) <= 3e-5);
}

TEST_CASE("pnb bases are rejected by the Plancherel check") {
  const auto grid = CriticalLineGrid::build(10, 0.1, 0.01, 1.0, 1);
  BasisSpec b;
  b.elements.push_back(Distribution::exponential(1));
  b.mode = BasisMode::pnb;
  CHECK_THROWS_AS(plancherel_residual(b, {1.0}, grid), CapabilityError);
}

TEST_CASE("V_n profile") {
  std::vector<double> grid;
  for (int i = 0; i < 12; ++i) grid.push_back(0.1 * std::pow(500.0, i / 11.0));
  SUBCASE("point masses at 1/k give zero") {
    std::vector<Distribution> fam;
    for (int k = 1; k <= 4; ++k) fam.push_back(Distribution::point_mass(1.0 / k));
    for (const auto& p : vn_profile(4, 0.1, fam, grid, 1000, RngStream{1, 0})) CHECK(p.mean <= 1e-24);
  }
  SUBCASE("bound dominates the mean and the peak shrinks with n") {
    double prev = INFINITY;
    for (int n : {2, 4, 8}) {
      const auto pts = vn_profile(n, 0.1, concentrated_family(n, 1.0), grid, 4000, RngStream{3, 0});
      double peak = 0;
      for (const auto& p : pts) {
        CHECK(p.mean <= p.bound_mc * (1 + 1e-12));
        CHECK(p.bound_mc == doctest::Approx(p.bound).epsilon(0.1));
        peak = std::max(peak, p.mean);
      }
      CHECK(peak < prev);
      prev = peak;
    }
  }
  SUBCASE("thread count does not change the estimate") {
    const auto fam = concentrated_family(4, 1.0);
    const auto a = vn_profile(4, 0.1, fam, grid, 3000, RngStream{5, 0}, 1);
    const auto b = vn_profile(4, 0.1, fam, grid, 3000, RngStream{5, 0}, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].mean == b[i].mean);
      CHECK(a[i].stderr_ == b[i].stderr_);
    }
  }
}
