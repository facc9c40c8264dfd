#include "nblab/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "nblab/errors.hpp"
#include "nblab/parallel.hpp"

namespace nblab {

namespace {

constexpr std::size_t kPanelBudget = 6000;

// Gauss-Kronrod 7-15 on [-1, 1].
constexpr std::array<double, 8> kKronrodX = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                             0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodW = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                             0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                             0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                             0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussW = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0, b = 0;
  std::vector<double> value;  // Kronrod estimate per component
  std::vector<double> err;    // |Kronrod - Gauss| per component
  double max_err = 0;
};

// Vector integrand over x in (x_f, 2): t = x on (0, 1], t = 1/(2 - x) beyond.
class RandomGramIntegrand {
 public:
  explicit RandomGramIntegrand(const BasisSpec& basis) : basis_(basis), n_(basis.size()) {}

  std::size_t size() const { return n_; }
  std::size_t pairs() const { return n_ * (n_ + 1) / 2; }
  std::size_t components() const { return pairs() + n_ + 1; }
  std::size_t pair_index(std::size_t k, std::size_t l) const {
    if (k > l) std::swap(k, l);
    return k * n_ - k * (k - 1) / 2 + (l - k);
  }

  void eval(double x, std::vector<double>& out, std::vector<double>& psi) const {
    double t, jac;
    if (x <= 1.0) {
      t = x;
      jac = 1.0;
    } else {
      const double v = 2.0 - x;
      t = 1.0 / v;
      jac = t * t;
    }
    for (std::size_t k = 0; k < n_; ++k) psi[k] = mean_beurling(basis_.elements[k], t);
    const double target = target_at(t);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t l = k; l < n_; ++l) out[idx++] = psi[k] * psi[l] * jac;
    for (std::size_t k = 0; k < n_; ++k) out[idx++] = target * psi[k] * jac;
    out[idx] = target * target * jac;
  }

  double target_at(double t) const {
    if (basis_.target.is_chi()) return t <= 1.0 ? 1.0 : 0.0;
    return survival(*basis_.target.survival_of, t);
  }

 private:
  const BasisSpec& basis_;
  std::size_t n_;
};

Panel integrate_panel(const RandomGramIntegrand& f, double a, double b) {
  const std::size_t m = f.components();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::vector<double> kron(m, 0.0), gauss(m, 0.0), lo(m), hi(m);
  std::vector<double> psi(f.size());
  f.eval(c, lo, psi);
  for (std::size_t j = 0; j < m; ++j) {
    kron[j] = kKronrodW[7] * lo[j];
    gauss[j] = kGaussW[3] * lo[j];
  }
  for (std::size_t i = 0; i < 7; ++i) {
    f.eval(c - h * kKronrodX[i], lo, psi);
    f.eval(c + h * kKronrodX[i], hi, psi);
    for (std::size_t j = 0; j < m; ++j) {
      const double s = lo[j] + hi[j];
      kron[j] += kKronrodW[i] * s;
      if (i % 2 == 1) gauss[j] += kGaussW[i / 2] * s;
    }
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value.resize(m);
  p.err.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    p.value[j] = kron[j] * h;
    p.err[j] = std::abs((kron[j] - gauss[j]) * h);
    p.max_err = std::max(p.max_err, p.err[j]);
  }
  return p;
}

double to_x(double t) { return t <= 1.0 ? t : 2.0 - 1.0 / t; }

void require_mixed_free(const BasisSpec& basis) {
  const auto point_masses = std::count_if(basis.elements.begin(), basis.elements.end(),
                                          [](const Distribution& d) { return d.is_point_mass(); });
  if (point_masses != 0 && static_cast<std::size_t>(point_masses) != basis.size())
    throw CapabilityError("bases mixing point masses with random laws are not supported");
}

bool all_point_masses(const BasisSpec& basis) {
  return std::all_of(basis.elements.begin(), basis.elements.end(),
                     [](const Distribution& d) { return d.is_point_mass(); });
}

GramSystem point_mass_system(const BasisSpec& basis, double tol, unsigned threads) {
  if (!basis.target.is_chi())
    throw CapabilityError("point-mass bases are only supported against the chi target");
  std::vector<double> thetas;
  for (const auto& d : basis.elements) thetas.push_back(mean(d));
  return assemble_deterministic(thetas, std::max(tol, kDefaultInnerTol), threads);
}

GramSystem gnb_system(const BasisSpec& basis, double tol, unsigned threads) {
  require_mixed_free(basis);
  if (all_point_masses(basis)) return point_mass_system(basis, tol, threads);
  if (!(tol > 0)) throw DomainError("quadrature tolerance must be positive");

  const std::size_t n = basis.size();
  std::vector<double> variation(n);
  double v_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    variation[k] = density_variation(basis.elements[k]);
    if (!std::isfinite(variation[k]))
      throw CapabilityError("mean Beurling inner products need a bounded density; " +
                            basis.elements[k].to_string() + " has none");
    v_max = std::max(v_max, variation[k]);
  }
  const double t_floor = std::min(0.1, std::sqrt(3.0 * tol / v_max));

  RandomGramIntegrand f(basis);
  const std::size_t m = f.components();

  std::vector<double> cuts;
  for (double t = t_floor; t < 1.0; t *= 10.0) cuts.push_back(t);
  cuts.push_back(1.0);
  cuts.push_back(1.5);
  cuts.push_back(2.0);
  if (!basis.target.is_chi() && basis.target.survival_of->is_point_mass()) {
    const double x = to_x(mean(*basis.target.survival_of));
    if (x > t_floor && x < 2.0) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> pending;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) pending.emplace_back(cuts[i], cuts[i + 1]);
  std::vector<Panel> done;
  const double width = 2.0 - t_floor;
  const double panel_tol = 0.5 * tol;
  while (!pending.empty()) {
    if (done.size() + pending.size() > kPanelBudget) {
      double achieved = 0.0;
      for (const auto& p : done) achieved += p.max_err;
      std::ostringstream os;
      os << "mean Beurling quadrature did not reach tol " << tol << " within " << kPanelBudget << " panels";
      throw ResourceError(os.str(), achieved);
    }
    std::vector<Panel> batch(pending.size());
    parallel_for(pending.size(), threads,
                 [&](std::size_t i) { batch[i] = integrate_panel(f, pending[i].first, pending[i].second); });
    pending.clear();
    for (auto& p : batch) {
      if (p.max_err > panel_tol * (p.b - p.a) / width && p.b - p.a > 1e-12) {
        const double mid = 0.5 * (p.a + p.b);
        pending.emplace_back(p.a, mid);
        pending.emplace_back(mid, p.b);
      } else {
        done.push_back(std::move(p));
      }
    }
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<double> total(m, 0.0), total_err(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    CompensatedSum s, e;
    for (const auto& p : done) {
      s.add(p.value[j]);
      e.add(p.err[j]);
    }
    total[j] = s.value();
    total_err[j] = e.value();
  }

  // On (0, t_floor) every Psi_k is replaced by 1/2.
  double target_floor = t_floor, target_floor_err = 0.0, target_sq_floor = t_floor, target_sq_floor_err = 0.0;
  if (!basis.target.is_chi()) {
    const double s = f.target_at(t_floor);
    target_floor = 0.5 * t_floor * (1.0 + s);
    target_floor_err = 0.5 * t_floor * (1.0 - s);
    target_sq_floor = 0.5 * t_floor * (1.0 + s * s);
    target_sq_floor_err = 0.5 * t_floor * (1.0 - s * s);
  }

  GramSystem sys;
  sys.g.resize(n, n);
  sys.entry_err.resize(n, n);
  sys.b.resize(n);
  sys.rhs_err.resize(n);
  const double tf2 = t_floor * t_floor;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const std::size_t idx = f.pair_index(k, l);
      const double value = total[idx] + 0.25 * t_floor;
      const double err = total_err[idx] + (variation[k] + variation[l]) * tf2 / 24.0;
      sys.g(k, l) = sys.g(l, k) = value;
      sys.entry_err(k, l) = sys.entry_err(l, k) = err;
    }
    sys.b(k) = total[f.pairs() + k] + 0.5 * target_floor;
    sys.rhs_err(k) = total_err[f.pairs() + k] + 0.5 * target_floor_err + variation[k] * tf2 / 24.0;
    sys.labels.push_back("psi[" + basis.elements[k].to_string() + "]");
  }
  if (basis.target.is_chi()) {
    sys.target_norm_sq = 1.0;
    sys.target_err = 0.0;
  } else {
    sys.target_norm_sq = total[m - 1] + target_sq_floor;
    sys.target_err = total_err[m - 1] + target_sq_floor_err;
  }
  sys.validate();
  return sys;
}

void to_pnb(GramSystem& sys, const BasisSpec& basis) {
  const auto& k_const = constants().k_const;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double m = mean(basis.elements[k]);
    sys.g(k, k) = k_const.value * m;
    sys.entry_err(k, k) = k_const.err * m + 4.0 * kEps * sys.g(k, k);
  }
  for (auto& label : sys.labels)
    if (label.rfind("psi[", 0) == 0) label = "rho_z[" + label.substr(4);
}

DistanceReport distance_from(const GramSystem& sys, const std::optional<std::vector<double>>& coeffs) {
  if (!coeffs) return solve(sys);
  if (coeffs->size() != sys.size()) throw DataError("coefficient count does not match the basis");
  DistanceReport r;
  r.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs->data(), static_cast<Eigen::Index>(coeffs->size()));
  r.distance_sq = r.raw_distance_sq = residual_with_coeffs(sys, r.coeffs);
  r.certified_slack = residual_slack(sys, r.coeffs);
  return r;
}

}  // namespace

std::vector<double> mobius_coefficients(int n, double epsilon) {
  if (!(epsilon >= 0)) throw DomainError("epsilon must be nonnegative");
  const auto mu = mobius_sieve(n);
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) c[k - 1] = -mu[k - 1] * std::pow(static_cast<double>(k), -epsilon);
  return c;
}

NuResult nu_from_system(const GramSystem& bd_system, int n, double epsilon) {
  if (n < 1) throw DomainError("nu: n must be >= 1");
  if (bd_system.size() < static_cast<std::size_t>(n)) throw DataError("nu: system smaller than n");
  GramSystem sub;
  sub.g = bd_system.g.topLeftCorner(n, n);
  sub.entry_err = bd_system.entry_err.topLeftCorner(n, n);
  sub.b = bd_system.b.head(n);
  sub.rhs_err = bd_system.rhs_err.head(n);
  sub.target_norm_sq = bd_system.target_norm_sq;
  sub.target_err = bd_system.target_err;
  const auto c = mobius_coefficients(n, epsilon);
  const Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  return {residual_with_coeffs(sub, cv), residual_slack(sub, cv)};
}

NuResult nu_eval(int n, double epsilon, double tol, unsigned threads) {
  if (n < 1) throw DomainError("nu: n must be >= 1");
  std::vector<double> thetas(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) thetas[k - 1] = 1.0 / k;
  return nu_from_system(assemble_deterministic(thetas, tol, threads), n, epsilon);
}

GramSystem assemble_random(const BasisSpec& basis, double tol, unsigned threads) {
  basis.validate();
  if (basis.mode == BasisMode::deterministic) {
    if (!basis.target.is_chi()) throw CapabilityError("deterministic bases are only supported against chi");
    return point_mass_system(basis, tol, threads);
  }
  auto sys = gnb_system(basis, tol, threads);
  if (basis.mode == BasisMode::pnb && !all_point_masses(basis)) to_pnb(sys, basis);
  return sys;
}

DistanceReport gnb_distance(const BasisSpec& basis, const std::optional<std::vector<double>>& coeffs, double tol,
                            unsigned threads) {
  if (basis.mode != BasisMode::gnb) throw ContractError("gnb_distance needs a basis in gnb mode");
  return distance_from(assemble_random(basis, tol, threads), coeffs);
}

DistanceReport pnb_distance(const BasisSpec& basis, const std::optional<std::vector<double>>& coeffs, double tol,
                            unsigned threads) {
  if (basis.mode != BasisMode::pnb) throw ContractError("pnb_distance needs a basis in pnb mode");
  return distance_from(assemble_random(basis, tol, threads), coeffs);
}

double assumption_p(const BasisSpec& basis) {
  if (!basis.independence) throw ContractError("assumption (P) product form needs an independent family");
  if (basis.elements.empty()) throw DomainError("basis must contain at least one element");
  double p = 1.0;
  for (const auto& d : basis.elements) p *= cdf(d, 1.0);
  return p;
}

SuffiResult suffi_bound(const BasisSpec& basis, std::size_t mc_count, const RngStream& rng, unsigned threads) {
  if (basis.elements.empty()) throw DomainError("basis must contain at least one element");
  SuffiResult out;
  if (all_point_masses(basis)) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& d : basis.elements) m = std::min(m, mean(d));
    out.mean_abs_log_min = std::abs(std::log(m));
    out.value = 1.0 / (std::log(2.0) + out.mean_abs_log_min);
    return out;
  }
  if (!basis.independence) throw ContractError("Monte Carlo minimum needs an independent family");
  if (mc_count < 10000) throw DomainError("suffi_bound: mc_count must be at least 10000");
  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (mc_count + chunk - 1) / chunk;
  std::vector<double> sums(chunks), squares(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    CompensatedSum s, s2;
    for (std::size_t i = c * chunk; i < std::min(mc_count, (c + 1) * chunk); ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < basis.size(); ++k)
        m = std::min(m, sample_at(basis.elements[k], rng.substream(k), i));
      const double v = std::abs(std::log(m));
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
  const double count = static_cast<double>(mc_count);
  out.mean_abs_log_min = s.value() / count;
  const double var = std::max(0.0, s2.value() / count - out.mean_abs_log_min * out.mean_abs_log_min);
  out.stderr_ = std::sqrt(var / (count - 1.0));
  out.value = 1.0 / (std::log(2.0) + out.mean_abs_log_min);
  return out;
}

ConditionCResult condition_c(const std::vector<std::vector<double>>& coeffs_by_n, double beta) {
  if (!(beta > 1.0)) throw DomainError("condition (C) needs beta > 1");
  ConditionCResult out;
  for (const auto& c : coeffs_by_n) {
    CompensatedSum s;
    for (std::size_t k = 0; k < c.size(); ++k) s.add(c[k] * c[k] * std::pow(static_cast<double>(k + 1), -beta));
    out.per_n.push_back(s.value());
  }
  if (out.per_n.empty()) return out;
  const auto it = std::max_element(out.per_n.begin(), out.per_n.end());
  out.value = *it;
  const std::size_t n = out.per_n.size();
  const auto argmax = static_cast<std::size_t>(it - out.per_n.begin());
  out.growing = n >= 2 && argmax + std::max<std::size_t>(1, n / 10) >= n && out.per_n[n - 1] > out.per_n[n - 2];
  return out;
}

std::vector<MomentGrowthRow> moment_growth(const std::vector<Distribution>& family, const std::vector<double>& alphas) {
  if (family.empty()) throw DomainError("moment_growth: empty family");
  std::vector<MomentGrowthRow> rows;
  for (double alpha : alphas) {
    if (!(alpha >= 1.0)) throw DomainError("moment_growth: alpha must be >= 1");
    std::vector<double> scaled(family.size());
    for (std::size_t k = 0; k < family.size(); ++k)
      scaled[k] = std::pow(static_cast<double>(k + 1), alpha) * moment(family[k], alpha);
    MomentGrowthRow row;
    row.alpha = alpha;
    const auto it = std::max_element(scaled.begin(), scaled.end());
    row.sup = *it;
    row.argmax = static_cast<int>(it - scaled.begin()) + 1;
    const std::size_t half = scaled.size() / 2;
    bool increasing = scaled.size() >= 2;
    for (std::size_t k = half; k + 1 < scaled.size(); ++k) increasing = increasing && scaled[k + 1] > scaled[k];
    row.violation = increasing && static_cast<std::size_t>(row.argmax) == family.size();
    rows.push_back(row);
  }
  return rows;
}

std::vector<T2Row> t2_check(const Target& target, const std::vector<double>& m_grid) {
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (!(m_grid[i] > 0)) throw DomainError("t2_check: M must be positive");
    if (i > 0 && !(m_grid[i] > m_grid[i - 1])) throw DomainError("t2_check: M grid must be increasing");
  }
  std::vector<T2Row> rows;
  for (double m : m_grid) {
    T2Row row;
    row.m = m;
    if (target.is_chi()) {
      row.value = m < 1.0 ? m * (1.0 - m) : 0.0;
    } else {
      const auto& d = *target.survival_of;
      // S^2 is nonincreasing: on each cell [x, x + h] it lies between its end
      // values, and beyond U it is at most S(U) times the survival integral.
      const double upper = std::max(m, upper_quantile(d, 1e-17));
      CompensatedSum lo, hi;
      if (upper > m) {
        constexpr int cells = 20000;
        const double h = (upper - m) / cells;
        double prev = std::pow(survival(d, m), 2);
        for (int i = 1; i <= cells; ++i) {
          const double cur = std::pow(survival(d, m + i * h), 2);
          lo.add(cur * h);
          hi.add(prev * h);
          prev = cur;
        }
      }
      const double tail = survival(d, upper) * tail_expectation(d, upper);
      const double a = lo.value(), b = hi.value() + tail;
      row.value = m * 0.5 * (a + b);
      row.err = m * 0.5 * (b - a);
    }
    rows.push_back(row);
  }
  return rows;
}

double gamma_kn_tail_term(int n, double beta, double m) {
  return std::pow(static_cast<double>(n), beta) * m * std::exp(-0.5 * n * (m - 2.0));
}

std::vector<Distribution> preset_family(const std::string& name, int n, std::optional<double> scale,
                                        double vartheta) {
  if (n < 1) throw DomainError("preset: n must be >= 1");
  std::vector<Distribution> out;
  if (name == "bd") {
    for (int k = 1; k <= n; ++k) out.push_back(Distribution::point_mass(1.0 / k));
  } else if (name == "exp-dilated") {
    const double c = scale.value_or(1.0);
    for (int k = 1; k <= n; ++k) out.push_back(Distribution::exponential(k * c));
  } else if (name == "gamma-kn") {
    const double rate = scale.value_or(static_cast<double>(n));
    for (int k = 1; k <= n; ++k) out.push_back(Distribution::gamma(k, rate));
  } else if (name == "concentrated") {
    if (!scale) return concentrated_family(n, vartheta);
    for (int k = 1; k <= n; ++k) out.push_back(Distribution::squared_gamma(*scale / k, *scale / std::sqrt(double(k))));
  } else {
    throw DataError("unknown preset '" + name + "' (expected bd, exp-dilated, gamma-kn or concentrated)");
  }
  return out;
}

BasisMode preset_default_mode(const std::string& name) {
  if (name == "bd") return BasisMode::deterministic;
  if (name == "exp-dilated" || name == "gamma-kn") return BasisMode::gnb;
  if (name == "concentrated") return BasisMode::pnb;
  throw DataError("unknown preset '" + name + "'");
}

}  // namespace nblab
