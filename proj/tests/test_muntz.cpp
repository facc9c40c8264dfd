#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "nblab/distribution.hpp"
#include "nblab/errors.hpp"
#include "nblab/muntz.hpp"
#include "oracles.hpp"

using namespace nblab;

TEST_CASE("Muntz transform of e^-x is 1/(e^t - 1) - 1/t") {
  const auto k = KernelSpec::survival_of(Distribution::exponential(1));
  for (double t : {0.01, 0.1, 1.0, 5.0, 30.0}) {
    const double expected = 1 / std::expm1(t) - 1 / t;
    CHECK(std::abs(muntz_transform(k, t) - expected) <= 2e-10);
  }
}

TEST_CASE("E{X/t} = -Pf(t) for f the survival function") {
  for (const char* lit : {"exp:1", "gamma:2:3", "sqgamma:3:2"}) {
    const auto d = Distribution::parse(lit);
    const auto k = KernelSpec::survival_of(d);
    for (double t : {0.05, 0.3, 1.0, 4.0}) {
      INFO(lit << " t = " << t);
      CHECK(std::abs(muntz_transform(k, t) + mean_beurling(d, t, PsiMethod::muntz_series).value) <= 1e-9);
    }
  }
}

TEST_CASE("kernel integral is the mean") {
  CHECK(KernelSpec::survival_of(Distribution::gamma(2, 3)).integral().value == doctest::Approx(2.0 / 3));
}

TEST_CASE("sampled kernel converges to the analytic transform") {
  // Survival of Exp(1) on [0, 40], forced to 0 at the last point.
  auto sampled = [](int points) {
    std::vector<double> x(points), f(points);
    for (int i = 0; i < points; ++i) {
      x[i] = 40.0 * i / (points - 1);
      f[i] = i + 1 == points ? 0.0 : std::exp(-x[i]);
    }
    return KernelSpec::sampled(x, f);
  };
  const double t = 0.7, exact = 1 / std::expm1(t) - 1 / t;
  const double coarse = std::abs(muntz_transform(sampled(2001), t) - exact);
  const double fine = std::abs(muntz_transform(sampled(8001), t) - exact);
  CHECK(fine < 1e-4);
  CHECK(fine < coarse / 3);
  const auto k = sampled(2001);
  CHECK(k.integral().contains(1.0 - std::exp(-40.0)));
  CHECK(k(0.0) == 1.0);
  CHECK(k(50.0) == 0.0);
}

TEST_CASE("sampled kernel validation") {
  CHECK_THROWS_AS(KernelSpec::sampled({0, 1, 2}, {1, 2, 0}), DataError);
  CHECK_THROWS_AS(KernelSpec::sampled({0, 2, 1}, {1, 0.5, 0}), DataError);
  CHECK_THROWS_AS(KernelSpec::sampled({0, 1}, {1, -0.5}), DataError);
  CHECK_THROWS_AS(KernelSpec::sampled({0, 1}, {1, NAN}), DataError);
  CHECK_THROWS_AS(muntz_transform(KernelSpec::sampled({0, 1}, {1, 0.5}), 1.0), CapabilityError);
}

TEST_CASE("CSV kernels load with or without a header") {
  const std::string path = "muntz_kernel_test.csv";
  {
    std::ofstream out(path);
    out << "x,f\n0,1\n1,0.5\n3,0\n";
  }
  const auto k = KernelSpec::load_csv(path);
  CHECK(k(0.5) == doctest::Approx(0.75));
  CHECK(k.integral().value == doctest::Approx(0.75 + 0.5));
  std::remove(path.c_str());
  CHECK_THROWS_AS(KernelSpec::load_csv("does_not_exist.csv"), IoError);
}

TEST_CASE("identity gap stays within four standard errors") {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.05 * std::pow(400.0, i / 9.0));
  for (const char* lit : {"exp:1", "gamma:2:3"}) {
    const auto pts = identity_gap(Distribution::parse(lit), grid, 200000, RngStream{7, 0});
    REQUIRE(pts.size() == grid.size());
    for (const auto& p : pts) {
      INFO(lit << " t = " << p.t);
      CHECK(p.gap <= 4 * p.mc_stderr);
      CHECK(p.gap == doctest::Approx(std::abs(p.mc_mean + p.transform)));
    }
  }
  CHECK_THROWS_AS(identity_gap(Distribution::exponential(1), grid, 100, RngStream{}), DomainError);
}
