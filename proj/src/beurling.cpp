#include "nblab/beurling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "nblab/errors.hpp"

namespace nblab {

namespace {

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << name << " must be a positive finite number, got " << x;
    throw DomainError(os.str());
  }
}

// Returns (p, q) with a/b == p/q to within a few ulps, or (0, 0) if no
// convergent with q <= 10^6 matches.
std::pair<double, double> small_rational(double ratio) {
  double x = ratio;
  double p_prev = 1.0, p = std::floor(x);
  double q_prev = 0.0, q = 1.0;
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(ratio - p / q) <= 8.0 * kEps * ratio) return {p, q};
    const double frac = x - std::floor(x);
    if (frac < 1e-300) break;
    x = 1.0 / frac;
    const double digit = std::floor(x);
    const double p_next = digit * p + p_prev;
    const double q_next = digit * q + q_prev;
    if (q_next > 1e6) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return {0.0, 0.0};
}

// Integrals of h^j / (u0 + h)^2 over [0, delta], j = 1, 2, written in terms of
// r = delta / u0. The second is returned divided by u0.
struct PieceMoments {
  double j1;
  double j2;
};

PieceMoments piece_moments(double r) {
  // j1 = sum_{k>=2} (-1)^k (k-1)/k r^k,  j2 = sum_{k>=3} (-1)^(k+1) (k-2)/k r^k
  if (r < 3e-4) {
    const double j1 = r * r * (0.5 + r * (-2.0 / 3.0 + r * (0.75 + r * (-0.8 + r * (5.0 / 6.0)))));
    const double j2 = r * r * r * (1.0 / 3.0 + r * (-0.5 + r * (0.6 + r * (-2.0 / 3.0 + r * (5.0 / 7.0)))));
    return {j1, j2};
  }
  if (r < 0.1) {
    double j1 = 0.0, j2 = 0.0;
    for (int k = 20; k >= 3; --k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      j1 = j1 * r + sign * (k - 1.0) / k;
      j2 = j2 * r - sign * (k - 2.0) / k;
    }
    j1 = (j1 * r + 0.5) * r * r;
    j2 = j2 * r * r * r;
    return {j1, j2};
  }
  const double l = std::log1p(r);
  const double s = r / (1.0 + r);
  return {l - s, r - 2.0 * l + s};
}

}  // namespace

double rho_eval(double theta, double t) {
  require_positive(theta, "theta");
  require_positive(t, "t");
  const double x = theta / t;
  return x - std::floor(x);
}

InnerProductDetail inner_rho_rho_detail(double a, double b, double tol, std::size_t budget) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(tol, "tol");
  if (a > b) std::swap(a, b);  // canonical order, so swapped arguments agree bit for bit

  const auto [p, q] = small_rational(a / b);
  const double tail_mean = (p > 0.0) ? 0.25 + 1.0 / (12.0 * p * q) : 0.25;
  const double tail_spread = std::max(tail_mean, 1.0 - tail_mean);

  const double cutoff_needed = tail_spread / (0.9 * tol);
  const double pieces_needed = (a + b) * cutoff_needed + 2.0;
  if (pieces_needed > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "inner_rho_rho(" << a << ", " << b << "): tolerance " << tol << " needs about "
       << pieces_needed << " breakpoints, budget is " << budget;
    throw ResourceError(os.str(), tail_spread * (a + b) / (0.9 * static_cast<double>(budget)));
  }

  // On (0, 1/b] both fractional parts equal the identity: integrand is ab.
  CompensatedSum total;
  double rounding = 0.0;
  double u0 = 1.0 / b;
  total.add(a * b * u0);
  double m = 0.0;  // floor(a u) on the current piece
  double n = 1.0;  // floor(b u) on the current piece
  if (1.0 / a == u0) m = 1.0;
  std::size_t pieces = 1;

  while (u0 < cutoff_needed) {
    const double next_a = (m + 1.0) / a;
    const double next_b = (n + 1.0) / b;
    const double u1 = std::min(next_a, next_b);
    const double alpha = std::max(0.0, a * u0 - m);
    const double beta = std::max(0.0, b * u0 - n);
    const double delta = u1 - u0;
    const double r = delta / u0;
    const double j0 = r / (u0 * (1.0 + r));
    const auto [j1, j2] = piece_moments(r);
    const double piece = alpha * beta * j0 + (a * beta + b * alpha) * j1 + a * b * u0 * j2;
    total.add(piece);
    rounding += 24.0 * kEps * piece + 4.0 * kEps * b * u0 * (j0 + b * j1);
    ++pieces;
    if (next_a <= u1) m += 1.0;
    if (next_b <= u1) n += 1.0;
    u0 = u1;
  }

  InnerProductDetail out;
  out.cutoff = u0;
  out.pieces = pieces;
  out.tail_bound = 1.0 / u0;
  out.tail_estimate = tail_mean / u0;
  out.rounding_bound = rounding + 4.0 * kEps * total.value();
  out.result.value = total.value() + out.tail_estimate;
  out.result.err = tail_spread / u0 + out.rounding_bound;
  return out;
}

BracketedValue inner_chi_rho(double theta, double tol, std::size_t budget) {
  require_positive(theta, "theta");
  require_positive(tol, "tol");
  const double one_minus_gamma = 1.0 - kEulerGamma;
  if (theta <= 1.0) {
    const double v = theta * (one_minus_gamma - std::log(theta));
    return {v, 8.0 * kEps * (theta * (1.0 + std::abs(std::log(theta))))};
  }
  // theta * int_theta^inf {v}/v^2 dv, written as theta * ((1 - gamma) - int_1^theta {v}/v^2 dv)
  // with the finite integral summed exactly over unit intervals.
  const double whole = std::floor(theta);
  if (whole > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "inner_chi_rho(" << theta << "): needs " << whole << " pieces, budget is " << budget;
    throw ResourceError(os.str(), 0.0);
  }
  CompensatedSum head;
  for (double j = 1.0; j < whole; j += 1.0) head.add(std::log1p(1.0 / j) - 1.0 / (j + 1.0));
  head.add(std::log(theta / whole) - (1.0 - whole / theta));
  const double v = theta * (one_minus_gamma - head.value());
  const double err = theta * kEps * (16.0 + 4.0 * whole);
  return {v, err};
}

BracketedValue norm_rho_sq(double theta) {
  require_positive(theta, "theta");
  const auto& k = constants().k_const;
  return {k.value * theta, k.err * theta + 2.0 * kEps * k.value * theta};
}

const Constants& constants() {
  // Function-local static: initialized once, with the standard's publication
  // guarantee for concurrent first use.
  static const Constants instance = [] {
    Constants c{};
    c.euler_gamma = kEulerGamma;
    c.k_const = inner_rho_rho(1.0, 1.0, 1e-7);
    return c;
  }();
  return instance;
}

}  // namespace nblab
