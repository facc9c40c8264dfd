#include "nblab/zeta.hpp"

#include <algorithm>
#include <boost/math/special_functions/bernoulli.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "nblab/errors.hpp"
#include "nblab/mobius.hpp"
#include "nblab/numeric.hpp"
#include "nblab/parallel.hpp"

namespace nblab {

namespace {

constexpr double kLog3PlusSqrt8 = 1.7627471740390860;  // log(3 + sqrt 8)
constexpr std::size_t kEtaMinTerms = 64;
constexpr int kEulerMaclaurinOrder = 20;

// Weights w_k = (d_n - d_k) / d_n of the Chebyshev-accelerated alternating
// series, computed from the ratios of consecutive terms of d_n in log space.
// Trailing weights below 1e-20 are dropped.
struct EtaTable {
  std::vector<double> weight;
  std::vector<double> log_k;  // log(k + 1)
};

EtaTable eta_table(std::size_t n) {
  std::vector<double> log_r(n + 1);
  log_r[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = static_cast<double>(i), fn = static_cast<double>(n);
    log_r[i + 1] = log_r[i] + std::log(4.0 * (fn + fi) * (fn - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0)));
  }
  const double top = *std::max_element(log_r.begin(), log_r.end());
  std::vector<double> suffix(n + 2, 0.0);
  for (std::size_t i = n + 1; i-- > 0;) suffix[i] = suffix[i + 1] + std::exp(log_r[i] - top);
  EtaTable table;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = suffix[k + 1] / suffix[0];
    if (w < 1e-20) break;
    table.weight.push_back(w);
    table.log_k.push_back(std::log(static_cast<double>(k + 1)));
  }
  return table;
}

const EtaTable& cached_eta_table(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, EtaTable> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, eta_table(n)).first;
  return it->second;
}

std::size_t eta_terms(double height) {
  const double n = (kPi * std::abs(height) / 2.0 + 40.0) / kLog3PlusSqrt8;
  const std::size_t rounded = (static_cast<std::size_t>(std::ceil(n)) + 63) / 64 * 64;
  return std::max(kEtaMinTerms, rounded);
}

cplx eta_series(cplx s) {
  const auto& table = cached_eta_table(eta_terms(s.imag()));
  CompensatedSum re, im;
  for (std::size_t k = 0; k < table.weight.size(); ++k) {
    const double lk = table.log_k[k];
    const double amp = table.weight[k] * std::exp(-s.real() * lk) * ((k % 2 == 0) ? 1.0 : -1.0);
    const double phase = s.imag() * lk;
    re.add(amp * std::cos(phase));
    im.add(-amp * std::sin(phase));
  }
  return {re.value(), im.value()};
}

void check_argument(cplx s) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("zeta: non-finite argument");
  if (s.real() == 1.0 && s.imag() == 0.0) throw PoleError("zeta has a pole at s = 1");
  if (!(s.real() > 0.0 && s.real() <= 2.0)) {
    std::ostringstream os;
    os << "zeta: Re s = " << s.real() << " outside (0, 2]";
    throw DomainError(os.str());
  }
  if (std::abs(s.imag()) > kZetaMaxHeight) {
    std::ostringstream os;
    os << "zeta: |Im s| = " << std::abs(s.imag()) << " above the supported height " << kZetaMaxHeight;
    throw DomainError(os.str());
  }
}

}  // namespace

cplx zeta_euler_maclaurin(cplx s, std::size_t n_terms, int m) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta has a pole at s = 1");
  if (n_terms < 1) throw DomainError("zeta_euler_maclaurin: need at least one term");
  CompensatedSum re, im;
  for (std::size_t k = 1; k < n_terms; ++k) {
    const cplx term = std::exp(-s * std::log(static_cast<double>(k)));
    re.add(term.real());
    im.add(term.imag());
  }
  const double nn = static_cast<double>(n_terms);
  const cplx n_pow = std::exp(-s * std::log(nn));  // N^-s
  cplx out = cplx(re.value(), im.value()) + n_pow * nn / (s - 1.0) + 0.5 * n_pow;
  // B_2j / (2j)! * s (s+1) ... (s+2j-2) * N^(-s-2j+1)
  cplx rising = s;
  cplx power = n_pow / nn;
  double factorial = 2.0;
  for (int j = 1; j <= m; ++j) {
    out += boost::math::bernoulli_b2n<double>(j) / factorial * rising * power;
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    power /= nn * nn;
    factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  return out;
}

ZetaValue zeta_eval_detail(cplx s) {
  check_argument(s);
  const double height = std::abs(s.imag());
  const cplx factor = 1.0 - std::exp((1.0 - s) * std::log(2.0));
  ZetaValue out;
  const bool validated = height <= kZetaValidatedHeight;
  cplx em;
  if (validated) em = zeta_euler_maclaurin(s, static_cast<std::size_t>(30.0 + height), kEulerMaclaurinOrder);
  // Near the zeros of 1 - 2^(1-s) on Re s = 1 the division loses accuracy.
  if (std::abs(factor) < 0.1) {
    if (!validated) {
      out.value = zeta_euler_maclaurin(s, static_cast<std::size_t>(30.0 + height), kEulerMaclaurinOrder);
      out.degraded = true;
      return out;
    }
    out.value = em;
    return out;
  }
  out.value = eta_series(s) / factor;
  if (validated) {
    out.cross_checked = true;
    out.method_gap = std::abs(out.value - em);
    out.degraded = out.method_gap > kZetaAgreementTol;
  } else {
    out.degraded = true;
  }
  return out;
}

double siegel_theta(double t) {
  const double a = std::abs(t);
  double v;
  if (a >= 10.0) {
    const double inv = 1.0 / a;
    v = 0.5 * a * std::log(a / (2.0 * kPi)) - 0.5 * a - kPi / 8.0 + inv / 48.0 + 7.0 * std::pow(inv, 3) / 5760.0 +
        31.0 * std::pow(inv, 5) / 80640.0 + 127.0 * std::pow(inv, 7) / 430080.0;
  } else {
    v = log_gamma(cplx(0.25, 0.5 * a)).imag() - 0.5 * a * std::log(kPi);
  }
  return t < 0 ? -v : v;
}

double hardy_z(double t) {
  const cplx z = zeta_eval(cplx(0.5, t));
  return (std::exp(cplx(0.0, siegel_theta(t))) * z).real();
}

double bracket_zero(double lo, double hi, double tol) {
  double flo = hardy_z(lo), fhi = hardy_z(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) {
    std::ostringstream os;
    os << "no sign change of Z(t) on [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = hardy_z(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CriticalLineGrid CriticalLineGrid::build(double t_max, double step, double fine_step, double fine_until,
                                         unsigned threads) {
  if (!(step > 0) || !(fine_step > 0) || !(fine_until >= 0) || !(t_max > fine_until))
    throw DomainError("critical line grid: need step, fine_step > 0 and t_max > fine_until >= 0");
  CriticalLineGrid g;
  g.t_max = t_max;
  g.step = step;
  g.fine_step = fine_step;
  g.fine_until = fine_until;
  const auto n_fine = static_cast<std::size_t>(std::llround(fine_until / fine_step));
  const auto n_coarse = static_cast<std::size_t>(std::ceil((t_max - fine_until) / step - 1e-9));
  for (std::size_t i = 0; i < n_fine; ++i) g.t.push_back(static_cast<double>(i) * fine_step);
  for (std::size_t j = 0; j <= n_coarse; ++j)
    g.t.push_back(std::min(t_max, fine_until + static_cast<double>(j) * step));
  g.zeta.resize(g.t.size());
  std::vector<double> gaps(g.t.size(), 0.0);
  parallel_for(g.t.size(), threads, [&](std::size_t i) {
    const auto z = zeta_eval_detail(cplx(0.5, g.t[i]));
    g.zeta[i] = z.value;
    gaps[i] = z.method_gap;
  });
  g.max_method_gap = *std::max_element(gaps.begin(), gaps.end());
  return g;
}

void CriticalLineGrid::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write grid file " + path);
  out.precision(17);
  out << "# t_max=" << t_max << "\n# step=" << step << "\n# fine_step=" << fine_step
      << "\n# fine_until=" << fine_until << "\n# max_method_gap=" << max_method_gap << "\nt,re,im\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << ',' << zeta[i].real() << ',' << zeta[i].imag() << '\n';
  if (!out) throw IoError("error while writing grid file " + path);
}

CriticalLineGrid CriticalLineGrid::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file " + path);
  CriticalLineGrid g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const double v = std::stod(line.substr(eq + 1));
      if (key == "t_max") g.t_max = v;
      if (key == "step") g.step = v;
      if (key == "fine_step") g.fine_step = v;
      if (key == "fine_until") g.fine_until = v;
      if (key == "max_method_gap") g.max_method_gap = v;
      continue;
    }
    if (line == "t,re,im") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0, re = 0, im = 0;
    if (!(row >> t >> re >> im)) throw DataError("grid file " + path + ": bad row");
    if (!std::isfinite(t) || !std::isfinite(re) || !std::isfinite(im))
      throw DataError("grid file " + path + ": non-finite value");
    if (!g.t.empty() && !(t > g.t.back())) throw DataError("grid file " + path + ": t must be increasing");
    g.t.push_back(t);
    g.zeta.emplace_back(re, im);
  }
  if (g.t.size() < 2) throw DataError("grid file " + path + " holds fewer than two points");
  if (g.t.front() != 0.0) throw DataError("grid file " + path + " must start at t = 0");
  if (g.t_max == 0) g.t_max = g.t.back();
  return g;
}

CriticalLineGrid CriticalLineGrid::cached(const std::string& path, double t_max, double step, double fine_step,
                                          double fine_until, unsigned threads) {
  if (std::filesystem::exists(path)) {
    auto g = load_csv(path);
    if (g.t_max == t_max && g.step == step && g.fine_step == fine_step && g.fine_until == fine_until) return g;
  }
  auto g = build(t_max, step, fine_step, fine_until, threads);
  g.save_csv(path);
  return g;
}

PlancherelResult plancherel_residual(const BasisSpec& basis, const std::vector<double>& coeffs,
                                     const CriticalLineGrid& grid) {
  if (basis.mode == BasisMode::pnb)
    throw CapabilityError("pnb distances are averages of squared errors and have no single Mellin image");
  if (!basis.elements.empty()) basis.validate();
  if (coeffs.size() != basis.size()) throw DataError("plancherel_residual: coefficient count does not match basis");
  if (grid.t.size() < 2 || grid.t.size() != grid.zeta.size()) throw DataError("plancherel_residual: empty grid");

  constexpr double eta = 0.25;
  const std::size_t n = basis.size();
  std::vector<double> f(grid.t.size());
  double envelope = 0.0;
  for (std::size_t i = 0; i < grid.t.size(); ++i) {
    const cplx s(0.5, grid.t[i]);
    cplx target;
    if (basis.target.is_chi())
      target = 1.0 / s;
    else
      target = mellin_moment(*basis.target.survival_of, s) / s;
    cplx mix = 0.0;
    for (std::size_t k = 0; k < n; ++k) mix += coeffs[k] * mellin_moment(basis.elements[k], s);
    f[i] = std::norm(target + grid.zeta[i] / s * mix);
    if (grid.t[i] >= 1.0) envelope = std::max(envelope, std::abs(grid.zeta[i]) / std::pow(grid.t[i], eta));
  }
  CompensatedSum integral;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) integral.add(0.5 * (grid.t[i + 1] - grid.t[i]) * (f[i] + f[i + 1]));

  // Beyond T: |F| <= (a + A B t^eta) / t with |zeta| <= A t^eta.
  double b = 0.0;
  for (std::size_t k = 0; k < n; ++k) b += std::abs(coeffs[k]) * moment(basis.elements[k], 0.5);
  const double a = basis.target.is_chi() ? 1.0 : moment(*basis.target.survival_of, 0.5);
  const double big_t = grid.t.back();
  const double c_zeta = std::pow(a * std::pow(big_t, -eta) + envelope * b, 2);

  PlancherelResult out;
  out.value = integral.value() / kPi;
  out.tail_bound = c_zeta * std::pow(big_t, 2.0 * eta - 1.0) / (1.0 - 2.0 * eta) / kPi;
  out.envelope_a = envelope;
  out.eta = eta;
  return out;
}

std::vector<VnPoint> vn_profile(int n, double epsilon, const std::vector<Distribution>& family,
                                const std::vector<double>& t_grid, std::size_t mc_count, const RngStream& rng,
                                unsigned threads) {
  if (n < 1) throw DomainError("vn_profile: n must be >= 1");
  if (!(epsilon > 0)) throw DomainError("vn_profile: epsilon must be positive");
  if (family.size() != static_cast<std::size_t>(n)) throw DataError("vn_profile: family length must equal n");
  if (mc_count < 1000) throw DomainError("vn_profile: mc_count must be at least 1000");

  const auto mu = mobius_sieve(n);
  const std::size_t nt = t_grid.size();
  std::vector<cplx> s(nt), zeta(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    s[j] = cplx(0.5, t_grid[j]);
    zeta[j] = zeta_eval(s[j]);
  }
  std::vector<double> a(n);
  std::vector<cplx> inv_k_pow(static_cast<std::size_t>(n) * nt);
  for (int k = 1; k <= n; ++k) {
    a[k - 1] = mu[k - 1] * std::pow(static_cast<double>(k), -epsilon);
    for (std::size_t j = 0; j < nt; ++j) inv_k_pow[(k - 1) * nt + j] = std::exp(-s[j] * std::log(double(k)));
  }

  constexpr std::size_t chunk = 1024;
  const std::size_t chunks = (mc_count + chunk - 1) / chunk;
  std::vector<double> sum_v(chunks * nt, 0.0), sum_v2(chunks * nt, 0.0), sum_b(chunks * nt, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<double> log_x(n);
    for (std::size_t i = c * chunk; i < std::min(mc_count, (c + 1) * chunk); ++i) {
      double gap_sq = 0.0;
      for (int k = 0; k < n; ++k) {
        const double x = sample_at(family[k], rng.substream(static_cast<std::uint64_t>(k)), i);
        log_x[k] = std::log(x);
        const double d = std::pow(double(k + 1), -0.5) - std::sqrt(x);
        gap_sq += d * d;
      }
      for (std::size_t j = 0; j < nt; ++j) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
          if (a[k] == 0.0) continue;
          acc += a[k] * (inv_k_pow[k * nt + j] - std::exp(s[j] * log_x[k]));
        }
        const double z2 = std::norm(zeta[j]);
        const double v = std::norm(acc) * z2 / std::norm(s[j]);
        sum_v[c * nt + j] += v;
        sum_v2[c * nt + j] += v * v;
        sum_b[c * nt + j] += 4.0 * n * gap_sq * z2;
      }
    }
  });

  double exact_gap = 0.0;
  for (int k = 1; k <= n; ++k) {
    const auto& d = family[k - 1];
    exact_gap += std::max(0.0, 1.0 / k - 2.0 * std::pow(double(k), -0.5) * moment(d, 0.5) + mean(d));
  }
  std::vector<VnPoint> out(nt);
  const double count = static_cast<double>(mc_count);
  for (std::size_t j = 0; j < nt; ++j) {
    CompensatedSum v, v2, b;
    for (std::size_t c = 0; c < chunks; ++c) {
      v.add(sum_v[c * nt + j]);
      v2.add(sum_v2[c * nt + j]);
      b.add(sum_b[c * nt + j]);
    }
    auto& p = out[j];
    p.t = t_grid[j];
    p.mean = v.value() / count;
    const double var = std::max(0.0, v2.value() / count - p.mean * p.mean) * count / (count - 1.0);
    p.stderr_ = std::sqrt(var / count);
    p.bound_mc = b.value() / count;
    p.bound = 4.0 * n * exact_gap * std::norm(zeta[j]);
  }
  return out;
}

}  // namespace nblab
