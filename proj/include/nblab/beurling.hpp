#pragma once

#include <cstddef>

#include "nblab/numeric.hpp"

namespace nblab {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

inline constexpr double kDefaultInnerTol = 1e-6;
inline constexpr std::size_t kDefaultBreakpointBudget = 50'000'000;

struct Constants {
  double euler_gamma;
  BracketedValue k_const;  // K = integral of {1/u}^2 over (0, inf) = ||rho_1||^2
};

/// Process-wide constants. K is integrated once on first use with this
/// library's own piecewise-exact integrator and cached.
const Constants& constants();

/// {theta / t}.
double rho_eval(double theta, double t);

struct InnerProductDetail {
  BracketedValue result;
  double cutoff = 0.0;         // U, the last integrated breakpoint in u = 1/t
  std::size_t pieces = 0;      // number of closed-form pieces summed
  double tail_estimate = 0.0;  // mean-value estimate of the tail, included in result.value
  double tail_bound = 0.0;     // certified bound on the tail (1/U)
  double rounding_bound = 0.0;
};

/// <rho_a, rho_b> in L^2(0, inf).
///
/// Integrated in u = 1/t as the integral of {au}{bu}/u^2. Between consecutive
/// breakpoints m/a and n/b the integrand is a quadratic over u^2 and is
/// integrated in closed form; every term is non-negative so no cancellation
/// occurs. The tail beyond U lies in [0, 1/U]. The reported value adds the
/// period-mean estimate of the tail (1/4 + 1/(12pq) over U when a/b = p/q with
/// small p, q; otherwise 1/4 over U) and err covers the whole interval [0, 1/U].
///
/// Throws ResourceError when U would need more than `budget` breakpoints.
InnerProductDetail inner_rho_rho_detail(double a, double b, double tol = kDefaultInnerTol,
                                        std::size_t budget = kDefaultBreakpointBudget);

inline BracketedValue inner_rho_rho(double a, double b, double tol = kDefaultInnerTol,
                                    std::size_t budget = kDefaultBreakpointBudget) {
  return inner_rho_rho_detail(a, b, tol, budget).result;
}

/// <chi, rho_theta> with chi the indicator of (0, 1].
BracketedValue inner_chi_rho(double theta, double tol = kDefaultInnerTol,
                             std::size_t budget = kDefaultBreakpointBudget);

/// ||rho_theta||^2 = K * theta.
BracketedValue norm_rho_sq(double theta);

}  // namespace nblab
