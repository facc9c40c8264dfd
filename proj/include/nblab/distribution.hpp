#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nblab/rng.hpp"

namespace nblab {

struct PointMass {
  double theta;
  bool operator==(const PointMass&) const = default;
};
struct Exponential {
  double rate;
  bool operator==(const Exponential&) const = default;
};
struct GammaDist {
  double shape;
  double rate;
  bool operator==(const GammaDist&) const = default;
};
/// Law of Y^2 with Y ~ Gamma(shape, rate).
struct SquaredGamma {
  double shape;
  double rate;
  bool operator==(const SquaredGamma&) const = default;
};

/// A positive random variable: one of the base laws times a positive factor.
///
/// Nested scalings collapse into one factor. Values are immutable.
class Distribution {
 public:
  using Base = std::variant<PointMass, Exponential, GammaDist, SquaredGamma>;

  static Distribution point_mass(double theta);
  static Distribution exponential(double rate);
  static Distribution gamma(double shape, double rate);
  static Distribution squared_gamma(double shape, double rate);
  static Distribution scaled(const Distribution& inner, double factor);

  /// Parses the literal grammar: `pointmass:T`, `exp:L`, `gamma:B:L`,
  /// `sqgamma:B:L`, `scaled:C:<literal>`. Throws DataError on bad input.
  static Distribution parse(std::string_view literal);

  const Base& base() const { return base_; }
  double factor() const { return factor_; }
  bool is_scaled() const { return scaled_; }
  bool is_point_mass() const { return std::holds_alternative<PointMass>(base_); }

  /// Literal form accepted by parse().
  std::string to_string() const;

  bool operator==(const Distribution&) const = default;

 private:
  Distribution(Base base, double factor, bool scaled) : base_(base), factor_(factor), scaled_(scaled) {}
  Base base_;
  double factor_ = 1.0;
  bool scaled_ = false;
};

/// E X^alpha, alpha >= 0, by closed form. Throws RangeError on overflow.
double moment(const Distribution& d, double alpha);

/// E X^s for complex s with Re(s) > -shape (Mellin image of the law).
std::complex<double> mellin_moment(const Distribution& d, std::complex<double> s);

double mean(const Distribution& d);

/// P(X >= x).
double survival(const Distribution& d, double x);

/// P(X <= x).
double cdf(const Distribution& d, double x);

/// E (X - x)_+ = integral of the survival function over [x, inf).
double tail_expectation(const Distribution& d, double x);

/// x with P(X < x) <= p (lower) or P(X > x) <= p (upper).
double lower_quantile(const Distribution& d, double p);
double upper_quantile(const Distribution& d, double p);

/// Total variation of the density including its jump at 0 (2 * max density
/// for the unimodal laws here); +inf when the density is unbounded, and for
/// point masses.
double density_variation(const Distribution& d);

/// Draw `index` of the stream. Gamma laws use Marsaglia-Tsang rejection,
/// exponential laws inversion.
double sample_at(const Distribution& d, const RngStream& rng, std::uint64_t index);

std::vector<double> sample(const Distribution& d, const RngStream& rng, std::size_t count,
                           std::uint64_t first_index = 0);

enum class PsiMethod { closed_form, muntz_series, monte_carlo, automatic };

struct PsiEstimate {
  double value = 0;
  double stderr_ = 0;  // Monte Carlo standard error; 0 for deterministic methods
};

struct MonteCarloSpec {
  std::size_t count = 0;
  RngStream rng{};
  unsigned threads = 1;
};

/// Mean Beurling function Psi(t) = E{X/t}.
///
/// closed_form covers point masses and exponential laws (and their scalings);
/// muntz_series uses Psi(t) = E X / t - sum_k P(X >= kt) with a certified
/// tail; monte_carlo averages {X_i / t}; automatic picks the cheapest
/// deterministic route, including the Fourier series of {x} for gamma laws at
/// small t. Throws CapabilityError when the method does not apply.
PsiEstimate mean_beurling(const Distribution& d, double t, PsiMethod method,
                          const MonteCarloSpec& mc = {});

inline double mean_beurling(const Distribution& d, double t) {
  return mean_beurling(d, t, PsiMethod::automatic).value;
}

/// E ||rho_X||^2 = K * E X.
double mean_rho_norm_sq(const Distribution& d);

/// X_{k,n} = Y^2, Y ~ Gamma(n^(3+vartheta)/k, n^(3+vartheta)/sqrt(k)), k = 1..n.
std::vector<Distribution> concentrated_family(int n, double vartheta);

}  // namespace nblab
