#include "nblab/muntz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "nblab/errors.hpp"

namespace nblab {

namespace {

constexpr double kTermBudget = 2e8;

double sampled_eval(const SampledKernel& k, double x) {
  if (x >= k.x.back()) return 0.0;
  if (x <= k.x.front()) return k.f.front();
  const auto it = std::upper_bound(k.x.begin(), k.x.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - k.x.begin()) - 1;
  const double w = (x - k.x[i]) / (k.x[i + 1] - k.x[i]);
  return k.f[i] + w * (k.f[i + 1] - k.f[i]);
}

// int_x^inf f for the piecewise-linear kernel.
double sampled_tail(const SampledKernel& k, double x) {
  if (x >= k.x.back()) return 0.0;
  CompensatedSum s;
  std::size_t i = 0;
  if (x <= k.x.front()) {
    s.add(k.f.front() * (k.x.front() - std::max(x, 0.0)));
  } else {
    i = static_cast<std::size_t>(std::upper_bound(k.x.begin(), k.x.end(), x) - k.x.begin()) - 1;
    s.add(0.5 * (sampled_eval(k, x) + k.f[i + 1]) * (k.x[i + 1] - x));
    ++i;
  }
  for (; i + 1 < k.x.size(); ++i) s.add(0.5 * (k.f[i] + k.f[i + 1]) * (k.x[i + 1] - k.x[i]));
  return s.value();
}

}  // namespace

KernelSpec KernelSpec::sampled(std::vector<double> x, std::vector<double> f) {
  if (x.size() != f.size()) throw DataError("sampled kernel: x and f differ in length");
  if (x.size() < 2) throw DataError("sampled kernel: need at least two points");
  if (!(x.front() >= 0.0)) throw DataError("sampled kernel: grid must start at x >= 0");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i])) throw DataError("sampled kernel: non-finite value");
    if (f[i] < 0.0) throw DataError("sampled kernel: negative kernel value");
    if (i > 0 && !(x[i] > x[i - 1])) throw DataError("sampled kernel: x must be strictly increasing");
    if (i > 0 && f[i] > f[i - 1]) throw DataError("sampled kernel: f must be nonincreasing");
  }
  return KernelSpec(SampledKernel{std::move(x), std::move(f)});
}

KernelSpec KernelSpec::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel file " + path);
  std::vector<double> xs, fs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0, f = 0;
    if (!(row >> x >> f)) {
      if (first) {
        first = false;
        continue;
      }
      throw DataError("kernel file " + path + ": bad row '" + line + "'");
    }
    first = false;
    xs.push_back(x);
    fs.push_back(f);
  }
  return sampled(std::move(xs), std::move(fs));
}

double KernelSpec::operator()(double x) const {
  if (auto d = std::get_if<Distribution>(&data_)) return survival(*d, x);
  return sampled_eval(std::get<SampledKernel>(data_), x);
}

BracketedValue KernelSpec::integral() const {
  if (auto d = std::get_if<Distribution>(&data_)) return {mean(*d), 0.0};
  const auto& k = std::get<SampledKernel>(data_);
  CompensatedSum slack;
  slack.add(0.0);
  for (std::size_t i = 0; i + 1 < k.x.size(); ++i) slack.add(0.5 * (k.f[i] - k.f[i + 1]) * (k.x[i + 1] - k.x[i]));
  // f is taken constant on (0, x0).
  return {sampled_tail(k, 0.0), slack.value()};
}

double muntz_transform(const KernelSpec& kernel, double t, double tol) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("muntz_transform: t must be positive");
  if (!(tol > 0.0)) throw DomainError("muntz_transform: tol must be positive");
  const double integral = kernel.integral().value;

  std::function<double(double)> tail;
  if (auto d = std::get_if<Distribution>(&kernel.data())) {
    tail = [d](double x) { return tail_expectation(*d, x); };
  } else {
    const auto& k = std::get<SampledKernel>(kernel.data());
    if (k.f.back() != 0.0)
      throw CapabilityError("sampled kernel does not reach 0 at the end of its grid; the tail cannot be bounded");
    tail = [&k](double x) { return sampled_tail(k, x); };
  }

  // Smallest N with (1/t) int_{Nt}^inf f <= tol.
  double hi = 1.0;
  while (tail(hi * t) / t > tol) {
    hi *= 2.0;
    if (hi > kTermBudget) {
      std::ostringstream os;
      os << "muntz_transform at t = " << t << " needs more than " << kTermBudget << " terms";
      throw ResourceError(os.str(), tail(kTermBudget * t) / t);
    }
  }
  double lo = 0.0;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (tail(mid * t) / t <= tol)
      hi = mid;
    else
      lo = mid;
  }

  CompensatedSum sum;
  for (double k = 1.0; k <= hi; k += 1.0) sum.add(kernel(k * t));
  sum.add(-integral / t);
  return sum.value();
}

std::vector<IdentityGapPoint> identity_gap(const Distribution& d, const std::vector<double>& t_grid,
                                           std::size_t mc_count, const RngStream& rng, unsigned threads) {
  if (mc_count < 10000) throw DomainError("identity_gap: mc_count must be at least 10000");
  const auto kernel = KernelSpec::survival_of(d);
  std::vector<IdentityGapPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    IdentityGapPoint p;
    p.t = t;
    const auto mc = mean_beurling(d, t, PsiMethod::monte_carlo, {mc_count, rng, threads});
    p.mc_mean = mc.value;
    p.mc_stderr = mc.stderr_;
    p.transform = muntz_transform(kernel, t);
    p.gap = std::abs(p.mc_mean + p.transform);
    out.push_back(p);
  }
  return out;
}

}  // namespace nblab
