#include "nblab/distribution.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "nblab/beurling.hpp"
#include "nblab/errors.hpp"
#include "nblab/numeric.hpp"
#include "nblab/parallel.hpp"
#include "nblab/special.hpp"

namespace nblab {

namespace {

namespace bm = boost::math;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesTailTarget = 1e-13;
constexpr double kLowerTailMass = 1e-18;
constexpr std::size_t kSeriesTermBudget = 50'000'000;
constexpr std::size_t kMonteCarloChunk = 4096;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive_param(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << what << " must be a positive finite number, got " << x;
    throw DomainError(os.str());
  }
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw RangeError(std::string(what) + ": value overflows double precision");
  return v;
}

// Gamma(shape + delta) / Gamma(shape).
double gamma_ratio(double shape, double delta) {
  if (delta == 0.0) return 1.0;
  return 1.0 / bm::tgamma_delta_ratio(shape, delta);
}

// log Gamma(shape + s) - log Gamma(shape), stable for large shape.
cplx log_gamma_shift(double shape, cplx s) {
  if (shape < 50.0) return log_gamma(shape + s) - log_gamma(cplx(shape, 0.0));
  // Stirling difference with log1p(w) = 2 atanh(w / (2 + w)).
  const cplx w = s / shape;
  const cplx l1p = 2.0 * std::atanh(w / (2.0 + w));
  const cplx z = shape + s;
  cplx out = (shape - 0.5) * l1p + s * std::log(z) - s;
  static constexpr double kB[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  for (int k = 1; k <= 5; ++k) {
    const double c = kB[k - 1] / (2.0 * k * (2.0 * k - 1.0));
    out += c * (std::pow(z, 1.0 - 2.0 * k) - std::pow(cplx(shape, 0.0), 1.0 - 2.0 * k));
  }
  return out;
}

double frac(double x) { return x - std::floor(x); }

// 1/x - 1/(e^x - 1)
double exponential_psi(double x) {
  if (x < 1e-4) return 0.5 - x / 12.0 + x * x * x / 720.0;
  if (x > 700.0) return 1.0 / x;
  return 1.0 / x - 1.0 / std::expm1(x);
}

// ---- per-law primitives on the unscaled base law -------------------------

double base_mean(const Distribution::Base& b) {
  return std::visit(overloaded{
                        [](const PointMass& p) { return p.theta; },
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const GammaDist& g) { return g.shape / g.rate; },
                        [](const SquaredGamma& g) { return g.shape * (g.shape + 1.0) / (g.rate * g.rate); },
                    },
                    b);
}

double base_survival(const Distribution::Base& b, double x) {
  if (x <= 0.0) return 1.0;
  return std::visit(overloaded{
                        [&](const PointMass& p) { return x <= p.theta ? 1.0 : 0.0; },
                        [&](const Exponential& e) { return std::exp(-e.rate * x); },
                        [&](const GammaDist& g) { return bm::gamma_q(g.shape, g.rate * x); },
                        [&](const SquaredGamma& g) { return bm::gamma_q(g.shape, g.rate * std::sqrt(x)); },
                    },
                    b);
}

double base_cdf(const Distribution::Base& b, double x) {
  if (x < 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const PointMass& p) { return x >= p.theta ? 1.0 : 0.0; },
                        [&](const Exponential& e) { return -std::expm1(-e.rate * x); },
                        [&](const GammaDist& g) { return x == 0.0 ? 0.0 : bm::gamma_p(g.shape, g.rate * x); },
                        [&](const SquaredGamma& g) {
                          return x == 0.0 ? 0.0 : bm::gamma_p(g.shape, g.rate * std::sqrt(x));
                        },
                    },
                    b);
}

double base_tail_expectation(const Distribution::Base& b, double x) {
  if (x <= 0.0) return base_mean(b) - std::max(x, 0.0);
  return std::visit(overloaded{
                        [&](const PointMass& p) { return std::max(p.theta - x, 0.0); },
                        [&](const Exponential& e) { return std::exp(-e.rate * x) / e.rate; },
                        [&](const GammaDist& g) {
                          const double z = g.rate * x;
                          const double q = bm::gamma_q(g.shape, z);
                          const double dens = bm::gamma_p_derivative(g.shape, z);
                          return std::max(0.0, (z * dens + (g.shape - z) * q) / g.rate);
                        },
                        [&](const SquaredGamma& g) {
                          const double z = g.rate * std::sqrt(x);
                          const double q = bm::gamma_q(g.shape, z);
                          const double dens = bm::gamma_p_derivative(g.shape, z);
                          const double v =
                              (g.shape * (g.shape + 1.0) - z * z) * q + (g.shape + 1.0 + z) * z * dens;
                          return std::max(0.0, v / (g.rate * g.rate));
                        },
                    },
                    b);
}

double base_lower_quantile(const Distribution::Base& b, double p) {
  return std::visit(overloaded{
                        [&](const PointMass& pm) { return pm.theta; },
                        [&](const Exponential& e) { return -std::log1p(-p) / e.rate; },
                        [&](const GammaDist& g) { return bm::gamma_p_inv(g.shape, p) / g.rate; },
                        [&](const SquaredGamma& g) {
                          const double y = bm::gamma_p_inv(g.shape, p) / g.rate;
                          return y * y;
                        },
                    },
                    b);
}

double base_upper_quantile(const Distribution::Base& b, double p) {
  return std::visit(overloaded{
                        [&](const PointMass& pm) { return pm.theta; },
                        [&](const Exponential& e) { return -std::log(p) / e.rate; },
                        [&](const GammaDist& g) { return bm::gamma_q_inv(g.shape, p) / g.rate; },
                        [&](const SquaredGamma& g) {
                          const double y = bm::gamma_q_inv(g.shape, p) / g.rate;
                          return y * y;
                        },
                    },
                    b);
}

double base_density_variation(const Distribution::Base& b) {
  return std::visit(overloaded{
                        [](const PointMass&) { return kInf; },
                        [](const Exponential& e) { return 2.0 * e.rate; },
                        [](const GammaDist& g) {
                          if (g.shape < 1.0) return kInf;
                          if (g.shape == 1.0) return 2.0 * g.rate;
                          return 2.0 * g.rate * bm::gamma_p_derivative(g.shape, g.shape - 1.0);
                        },
                        [](const SquaredGamma& g) {
                          if (g.shape < 2.0) return kInf;
                          if (g.shape == 2.0) return g.rate * g.rate;
                          const double y = (g.shape - 2.0) / g.rate;
                          const double fy = g.rate * bm::gamma_p_derivative(g.shape, g.rate * y);
                          return 2.0 * fy / (2.0 * y);
                        },
                    },
                    b);
}

// Marsaglia-Tsang for shape >= 1; boosted by U^(1/shape) below 1.
double sample_gamma(double shape, double rate, const RngStream& rng, std::uint64_t index) {
  const bool boost_shape = shape < 1.0;
  const double a = boost_shape ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double g = 0.0;
  for (std::uint32_t attempt = 0;; ++attempt) {
    const double x = rng.normal(index, 2 * attempt);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform(index, 2 * attempt + 1);
    if (u < 1.0 - 0.0331 * x * x * x * x || std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      g = d * v;
      break;
    }
  }
  if (boost_shape) g *= std::pow(rng.uniform(index, 0xFFFFFFFFu), 1.0 / shape);
  return g / rate;
}

double base_sample(const Distribution::Base& b, const RngStream& rng, std::uint64_t index) {
  return std::visit(overloaded{
                        [&](const PointMass& p) { return p.theta; },
                        [&](const Exponential& e) { return -std::log(rng.uniform(index, 0)) / e.rate; },
                        [&](const GammaDist& g) { return sample_gamma(g.shape, g.rate, rng, index); },
                        [&](const SquaredGamma& g) {
                          const double y = sample_gamma(g.shape, g.rate, rng, index);
                          return y * y;
                        },
                    },
                    b);
}

bool has_closed_psi(const Distribution::Base& b) {
  if (std::holds_alternative<PointMass>(b) || std::holds_alternative<Exponential>(b)) return true;
  if (auto g = std::get_if<GammaDist>(&b)) return g->shape == 1.0;
  return false;
}

double base_psi_closed(const Distribution::Base& b, double t) {
  return std::visit(overloaded{
                        [&](const PointMass& p) { return frac(p.theta / t); },
                        [&](const Exponential& e) { return exponential_psi(e.rate * t); },
                        [&](const GammaDist& g) { return exponential_psi(g.rate * t); },
                        [&](const SquaredGamma&) -> double { throw CapabilityError("no closed form"); },
                    },
                    b);
}

struct SeriesPlan {
  double first = 0;  // k_lo: terms k <= first are taken as exactly 1
  double last = 0;   // final index summed
};

SeriesPlan plan_muntz_series(const Distribution::Base& b, double t) {
  SeriesPlan plan;
  plan.first = std::floor(base_lower_quantile(b, kLowerTailMass) / t);
  auto tail_ok = [&](double m) { return base_tail_expectation(b, m * t) / t <= kSeriesTailTarget; };
  double hi = std::max(plan.first + 1.0, std::ceil(base_upper_quantile(b, 1e-20) / t));
  while (!tail_ok(hi)) hi *= 2.0;
  double lo = plan.first;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (tail_ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  plan.last = hi;
  return plan;
}

double base_psi_muntz(const Distribution::Base& b, double t) {
  if (auto p = std::get_if<PointMass>(&b)) return frac(p->theta / t);
  const SeriesPlan plan = plan_muntz_series(b, t);
  const double terms = plan.last - plan.first;
  if (terms > static_cast<double>(kSeriesTermBudget)) {
    std::ostringstream os;
    os << "Muntz series at t = " << t << " needs " << terms << " terms";
    throw ResourceError(os.str(), 0.0);
  }
  CompensatedSum sum;
  sum.add(base_mean(b) / t);
  sum.add(-plan.first);
  for (double k = plan.first + 1.0; k <= plan.last; k += 1.0) sum.add(-base_survival(b, k * t));
  return sum.value();
}

// Fourier series {y} = 1/2 - sum_m sin(2 pi m y) / (pi m), averaged against a
// gamma law through its characteristic function.
double fourier_terms_needed(const GammaDist& g, double t) {
  const double scale = g.rate * t / (2.0 * kPi);
  return std::ceil(scale * std::pow(kPi * g.shape * 1e-14, -1.0 / g.shape));
}

double gamma_psi_fourier(const GammaDist& g, double t) {
  const double terms = std::max(1.0, fourier_terms_needed(g, t));
  CompensatedSum sum;
  sum.add(0.5);
  for (double m = 1.0; m <= terms; m += 1.0) {
    const double y = 2.0 * kPi * m / (g.rate * t);
    const double im_phi = std::exp(-0.5 * g.shape * std::log1p(y * y)) * std::sin(g.shape * std::atan(y));
    sum.add(-im_phi / (kPi * m));
  }
  return sum.value();
}

double base_psi_automatic(const Distribution::Base& b, double t) {
  if (has_closed_psi(b)) return base_psi_closed(b, t);
  if (auto g = std::get_if<GammaDist>(&b)) {
    const double fourier_cost = fourier_terms_needed(*g, t);
    const double muntz_cost =
        (base_upper_quantile(b, 1e-20) - base_lower_quantile(b, kLowerTailMass)) / t;
    if (fourier_cost < muntz_cost) return gamma_psi_fourier(*g, t);
  }
  return base_psi_muntz(b, t);
}

PsiEstimate psi_monte_carlo(const Distribution& d, double t, const MonteCarloSpec& mc) {
  if (mc.count < 1) throw DomainError("monte_carlo: count must be at least 1");
  const std::size_t chunks = (mc.count + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<double> sums(chunks), squares(chunks);
  parallel_for(chunks, mc.threads, [&](std::size_t c) {
    CompensatedSum s, s2;
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(mc.count, begin + kMonteCarloChunk);
    for (std::size_t i = begin; i < end; ++i) {
      const double v = frac(sample_at(d, mc.rng, i) / t);
      s.add(v);
      s2.add(v * v);
    }
    sums[c] = s.value();
    squares[c] = s2.value();
  });
  CompensatedSum s, s2;
  for (std::size_t c = 0; c < chunks; ++c) {
    s.add(sums[c]);
    s2.add(squares[c]);
  }
  const double n = static_cast<double>(mc.count);
  const double m = s.value() / n;
  const double var = std::max(0.0, s2.value() / n - m * m) * n / std::max(1.0, n - 1.0);
  return {m, std::sqrt(var / n)};
}

double parse_number(std::string_view text, std::string_view literal) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw DataError("bad number '" + std::string(text) + "' in distribution literal '" + std::string(literal) + "'");
  return v;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---- construction -----------------------------------------------------------

Distribution Distribution::point_mass(double theta) {
  require_positive_param(theta, "point mass location");
  return Distribution(PointMass{theta}, 1.0, false);
}

Distribution Distribution::exponential(double rate) {
  require_positive_param(rate, "exponential rate");
  return Distribution(Exponential{rate}, 1.0, false);
}

Distribution Distribution::gamma(double shape, double rate) {
  require_positive_param(shape, "gamma shape");
  require_positive_param(rate, "gamma rate");
  return Distribution(GammaDist{shape, rate}, 1.0, false);
}

Distribution Distribution::squared_gamma(double shape, double rate) {
  require_positive_param(shape, "squared-gamma shape");
  require_positive_param(rate, "squared-gamma rate");
  return Distribution(SquaredGamma{shape, rate}, 1.0, false);
}

Distribution Distribution::scaled(const Distribution& inner, double factor) {
  require_positive_param(factor, "scale factor");
  return Distribution(inner.base_, inner.factor_ * factor, true);
}

Distribution Distribution::parse(std::string_view literal) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = literal.find(':', start);
    parts.push_back(literal.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  auto fail = [&](const char* why) -> Distribution {
    throw DataError("distribution literal '" + std::string(literal) + "': " + why);
  };
  auto expect = [&](std::size_t count) {
    if (parts.size() != count) fail("wrong number of fields");
  };
  try {
    const auto& tag = parts[0];
    if (tag == "pointmass") {
      expect(2);
      return point_mass(parse_number(parts[1], literal));
    }
    if (tag == "exp") {
      expect(2);
      return exponential(parse_number(parts[1], literal));
    }
    if (tag == "gamma") {
      expect(3);
      return gamma(parse_number(parts[1], literal), parse_number(parts[2], literal));
    }
    if (tag == "sqgamma") {
      expect(3);
      return squared_gamma(parse_number(parts[1], literal), parse_number(parts[2], literal));
    }
    if (tag == "scaled") {
      if (parts.size() < 3) fail("scaled needs a factor and an inner literal");
      const double factor = parse_number(parts[1], literal);
      const auto inner_start = parts[0].size() + parts[1].size() + 2;
      return scaled(parse(literal.substr(inner_start)), factor);
    }
  } catch (const DomainError& e) {
    throw DataError("distribution literal '" + std::string(literal) + "': " + e.what());
  }
  return fail("unknown law");
}

std::string Distribution::to_string() const {
  std::string base = std::visit(
      overloaded{
          [](const PointMass& p) { return "pointmass:" + format_number(p.theta); },
          [](const Exponential& e) { return "exp:" + format_number(e.rate); },
          [](const GammaDist& g) { return "gamma:" + format_number(g.shape) + ":" + format_number(g.rate); },
          [](const SquaredGamma& g) { return "sqgamma:" + format_number(g.shape) + ":" + format_number(g.rate); },
      },
      base_);
  if (!scaled_) return base;
  return "scaled:" + format_number(factor_) + ":" + base;
}

// ---- operations -------------------------------------------------------------

double moment(const Distribution& d, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("moment order must be >= 0");
  const double base = std::visit(
      overloaded{
          [&](const PointMass& p) { return std::pow(p.theta, alpha); },
          [&](const Exponential& e) { return std::tgamma(1.0 + alpha) / std::pow(e.rate, alpha); },
          [&](const GammaDist& g) { return gamma_ratio(g.shape, alpha) / std::pow(g.rate, alpha); },
          [&](const SquaredGamma& g) { return gamma_ratio(g.shape, 2.0 * alpha) / std::pow(g.rate, 2.0 * alpha); },
      },
      d.base());
  return checked(std::pow(d.factor(), alpha) * base, "moment");
}

cplx mellin_moment(const Distribution& d, cplx s) {
  const cplx base = std::visit(
      overloaded{
          [&](const PointMass& p) { return std::exp(s * std::log(p.theta)); },
          [&](const Exponential& e) { return std::exp(log_gamma(1.0 + s) - s * std::log(e.rate)); },
          [&](const GammaDist& g) { return std::exp(log_gamma_shift(g.shape, s) - s * std::log(g.rate)); },
          [&](const SquaredGamma& g) {
            return std::exp(log_gamma_shift(g.shape, 2.0 * s) - 2.0 * s * std::log(g.rate));
          },
      },
      d.base());
  return std::exp(s * std::log(d.factor())) * base;
}

double mean(const Distribution& d) { return d.factor() * base_mean(d.base()); }

double survival(const Distribution& d, double x) {
  if (!(x >= 0.0)) throw DomainError("survival: x must be >= 0");
  return base_survival(d.base(), x / d.factor());
}

double cdf(const Distribution& d, double x) { return base_cdf(d.base(), x / d.factor()); }

double tail_expectation(const Distribution& d, double x) {
  return d.factor() * base_tail_expectation(d.base(), x / d.factor());
}

double lower_quantile(const Distribution& d, double p) { return d.factor() * base_lower_quantile(d.base(), p); }

double upper_quantile(const Distribution& d, double p) { return d.factor() * base_upper_quantile(d.base(), p); }

double density_variation(const Distribution& d) { return base_density_variation(d.base()) / d.factor(); }

double sample_at(const Distribution& d, const RngStream& rng, std::uint64_t index) {
  return d.factor() * base_sample(d.base(), rng, index);
}

std::vector<double> sample(const Distribution& d, const RngStream& rng, std::size_t count,
                           std::uint64_t first_index) {
  if (count < 1) throw DomainError("sample: count must be at least 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = sample_at(d, rng, first_index + i);
  return out;
}

PsiEstimate mean_beurling(const Distribution& d, double t, PsiMethod method, const MonteCarloSpec& mc) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("mean_beurling: t must be positive");
  const double ts = t / d.factor();
  switch (method) {
    case PsiMethod::closed_form:
      if (!has_closed_psi(d.base()))
        throw CapabilityError("closed-form Psi is only available for point masses and exponential laws, not " +
                              d.to_string());
      return {base_psi_closed(d.base(), ts), 0.0};
    case PsiMethod::muntz_series:
      return {base_psi_muntz(d.base(), ts), 0.0};
    case PsiMethod::monte_carlo:
      return psi_monte_carlo(d, t, mc);
    case PsiMethod::automatic:
      return {base_psi_automatic(d.base(), ts), 0.0};
  }
  throw CapabilityError("unknown Psi method");
}

double mean_rho_norm_sq(const Distribution& d) {
  const double m = mean(d);
  if (!std::isfinite(m)) throw DomainError("mean_rho_norm_sq: infinite mean");
  return constants().k_const.value * m;
}

std::vector<Distribution> concentrated_family(int n, double vartheta) {
  if (n < 1) throw DomainError("concentrated_family: n must be >= 1");
  require_positive_param(vartheta, "vartheta");
  constexpr double kMaxScale = 1e12;
  const double scale = std::pow(static_cast<double>(n), 3.0 + vartheta);
  if (!(scale <= kMaxScale)) {
    std::ostringstream os;
    os << "concentrated_family: n^(3+vartheta) = " << scale << " exceeds " << kMaxScale
       << "; largest safe n is " << std::floor(std::pow(kMaxScale, 1.0 / (3.0 + vartheta)));
    throw RangeError(os.str());
  }
  std::vector<Distribution> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k)
    out.push_back(Distribution::squared_gamma(scale / k, scale / std::sqrt(static_cast<double>(k))));
  return out;
}

}  // namespace nblab
