#include <doctest.h>

#include <cmath>
#include <random>

#include "nblab/beurling.hpp"
#include "nblab/errors.hpp"
#include "oracles.hpp"

using namespace nblab;

TEST_CASE("rho_eval is the fractional part of theta / t") {
  CHECK(rho_eval(1.0, 0.3) == doctest::Approx(1 / 0.3 - 3));
  CHECK(rho_eval(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(rho_eval(2.0, 1.0) == 0.0);
  CHECK(rho_eval(0.5, 100.0) == doctest::Approx(0.005));
}

TEST_CASE("K matches log(2 pi) - gamma and the brute-force integral") {
  const auto& c = constants();
  CHECK(c.euler_gamma == doctest::Approx(oracle::kGamma).epsilon(1e-15));
  CHECK(std::abs(c.k_const.value - oracle::k_constant()) <= std::max(c.k_const.err, 1e-12));
  CHECK(c.k_const.err < 1e-7);
  const auto brute = oracle::inner_rho_rho(1, 1, 1e6);
  CHECK(std::abs(brute.value - c.k_const.value) <= brute.tail_uncertainty + c.k_const.err);
}

TEST_CASE("norm_rho_sq is K theta") {
  const double k = constants().k_const.value;
  for (double theta : {0.1, 0.5, 1.0, 3.0}) CHECK(norm_rho_sq(theta).value == doctest::Approx(k * theta));
  CHECK_THROWS_AS(norm_rho_sq(0.0), DomainError);
}

TEST_CASE("<chi, rho_theta> against theta (1 - gamma - log theta)") {
  for (double theta : {1.0, 0.5, 0.25, 1.0 / 3, 0.01}) {
    const auto r = inner_chi_rho(theta, 1e-9);
    CHECK(std::abs(r.value - oracle::chi_rho_small(theta)) <= r.err + 1e-12);
  }
  CHECK(inner_chi_rho(1.0).value == doctest::Approx(1 - oracle::kGamma).epsilon(1e-9));
}

TEST_CASE("<chi, rho_theta> for theta > 1 against quadrature") {
  for (double theta : {1.5, 2.0, 3.7}) {
    // int_0^1 {theta/t} dt, split at the breakpoints t = theta/m.
    double brute = 0;
    const int m_max = static_cast<int>(std::ceil(theta * 4000));
    for (int m = static_cast<int>(std::floor(theta)); m < m_max; ++m) {
      const double lo = theta / (m + 1), hi = std::min(1.0, theta / m);
      if (hi <= lo) continue;
      brute += oracle::gl8([&](double t) { return theta / t - m; }, lo, hi);
    }
    brute += theta / m_max * 0.5;  // remaining (0, theta/m_max) has mean 1/2
    const auto r = inner_chi_rho(theta, 1e-9);
    CHECK(std::abs(r.value - brute) < 1e-6 + r.err);
  }
}

TEST_CASE("inner_rho_rho brackets contain the brute-force value") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 5; ++i) {
    const double a = u(gen), b = u(gen);
    const auto r = inner_rho_rho(a, b, 1e-6);
    const auto o = oracle::inner_rho_rho(a, b, 2e6);
    INFO("a = " << a << ", b = " << b);
    CHECK(r.err <= 1e-6 * 1.01);
    CHECK(std::abs(r.value - o.value) <= r.err);
  }
}

TEST_CASE("inner product properties") {
  SUBCASE("symmetry") {
    const auto ab = inner_rho_rho(0.3, 0.7), ba = inner_rho_rho(0.7, 0.3);
    CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-12));
  }
  SUBCASE("homogeneity <rho_ca, rho_cb> = c <rho_a, rho_b>") {
    const auto r = inner_rho_rho(0.3, 0.7, 1e-7), s = inner_rho_rho(0.6, 1.4, 1e-7);
    CHECK(std::abs(s.value - 2 * r.value) <= s.err + 2 * r.err);
  }
  SUBCASE("diagonal is the norm") {
    const auto r = inner_rho_rho(0.4, 0.4, 1e-7);
    CHECK(std::abs(r.value - norm_rho_sq(0.4).value) <= r.err + 1e-12);
  }
  SUBCASE("Cauchy-Schwarz") {
    for (double a : {0.1, 0.5, 1.0})
      for (double b : {0.2, 0.9}) {
        const double r = inner_rho_rho(a, b).value;
        CHECK(r > 0);
        CHECK(r <= std::sqrt(norm_rho_sq(a).value * norm_rho_sq(b).value) + 1e-6);
      }
  }
  SUBCASE("error shrinks with tol") {
    CHECK(inner_rho_rho(0.3, 0.5, 1e-7).err <= 1e-7 * 1.01);
  }
}

TEST_CASE("inner_rho_rho reports budget exhaustion") {
  try {
    inner_rho_rho(0.5, 0.7, 1e-12, 1000);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(e.achievable() > 1e-12);
  }
  CHECK_THROWS_AS(inner_rho_rho(-1, 0.5), DomainError);
}
