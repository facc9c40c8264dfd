#include "nblab.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "nblab/basis.hpp"
#include "nblab/beurling.hpp"
#include "nblab/criteria.hpp"
#include "nblab/distribution.hpp"
#include "nblab/errors.hpp"
#include "nblab/gram.hpp"
#include "nblab/muntz.hpp"
#include "nblab/zeta.hpp"

struct nblab_distribution {
  nblab::Distribution value;
};
struct nblab_basis {
  nblab::BasisSpec value;
};
struct nblab_gram {
  nblab::GramSystem value;
};
struct nblab_report {
  nblab::DistanceReport value;
};
struct nblab_grid {
  nblab::CriticalLineGrid value;
};

namespace {

thread_local std::string g_last_error;
thread_local double g_last_achievable = 0.0;

struct InvalidArgument {
  const char* what;
};

nblab_status fail(nblab_status status, const std::string& message, double achievable = 0.0) {
  g_last_error = message;
  g_last_achievable = achievable;
  return status;
}

nblab_status from_kind(nblab::ErrorKind kind) {
  using nblab::ErrorKind;
  switch (kind) {
    case ErrorKind::domain:
      return NBLAB_ERR_DOMAIN;
    case ErrorKind::resource:
      return NBLAB_ERR_RESOURCE;
    case ErrorKind::capability:
      return NBLAB_ERR_CAPABILITY;
    case ErrorKind::data:
      return NBLAB_ERR_DATA;
    case ErrorKind::contract:
      return NBLAB_ERR_CONTRACT;
    case ErrorKind::range:
      return NBLAB_ERR_RANGE;
    case ErrorKind::pole:
      return NBLAB_ERR_POLE;
    case ErrorKind::io:
      return NBLAB_ERR_IO;
  }
  return NBLAB_ERR_INTERNAL;
}

template <class F>
nblab_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    g_last_achievable = 0.0;
    return NBLAB_OK;
  } catch (const InvalidArgument& e) {
    return fail(NBLAB_ERR_INVALID_ARGUMENT, e.what);
  } catch (const nblab::ResourceError& e) {
    return fail(NBLAB_ERR_RESOURCE, e.what(), e.achievable());
  } catch (const nblab::Error& e) {
    return fail(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NBLAB_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(NBLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NBLAB_ERR_INTERNAL, "unknown error");
  }
}

template <class... Ps>
void require(const char* what, const Ps*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw InvalidArgument{what};
}

void copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

nblab::BasisMode to_mode(int mode) {
  switch (mode) {
    case NBLAB_MODE_DETERMINISTIC:
      return nblab::BasisMode::deterministic;
    case NBLAB_MODE_GNB:
      return nblab::BasisMode::gnb;
    case NBLAB_MODE_PNB:
      return nblab::BasisMode::pnb;
  }
  throw InvalidArgument{"unknown basis mode"};
}

nblab_mode from_mode(nblab::BasisMode mode) {
  switch (mode) {
    case nblab::BasisMode::deterministic:
      return NBLAB_MODE_DETERMINISTIC;
    case nblab::BasisMode::gnb:
      return NBLAB_MODE_GNB;
    case nblab::BasisMode::pnb:
      return NBLAB_MODE_PNB;
  }
  return NBLAB_MODE_DETERMINISTIC;
}

std::optional<std::vector<double>> optional_coeffs(const double* coeffs, size_t n) {
  if (!coeffs) return std::nullopt;
  return std::vector<double>(coeffs, coeffs + n);
}

}  // namespace

extern "C" {

const char* nblab_version(void) { return "0.1.0"; }

const char* nblab_status_name(nblab_status status) {
  switch (status) {
    case NBLAB_OK:
      return "ok";
    case NBLAB_ERR_DOMAIN:
      return "domain";
    case NBLAB_ERR_RESOURCE:
      return "resource";
    case NBLAB_ERR_CAPABILITY:
      return "capability";
    case NBLAB_ERR_DATA:
      return "data";
    case NBLAB_ERR_CONTRACT:
      return "contract";
    case NBLAB_ERR_RANGE:
      return "range";
    case NBLAB_ERR_POLE:
      return "pole";
    case NBLAB_ERR_IO:
      return "io";
    case NBLAB_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case NBLAB_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* nblab_last_error(void) { return g_last_error.c_str(); }

double nblab_last_error_achievable(void) { return g_last_achievable; }

nblab_status nblab_constants(double* euler_gamma, double* k_value, double* k_err) {
  return guard([&] {
    const auto& c = nblab::constants();
    if (euler_gamma) *euler_gamma = c.euler_gamma;
    if (k_value) *k_value = c.k_const.value;
    if (k_err) *k_err = c.k_const.err;
  });
}

nblab_status nblab_burnol_constant(double* out) {
  return guard([&] {
    require("out is null", out);
    *out = nblab::kBurnolConstant;
  });
}

nblab_status nblab_rho_eval(double theta, double t, double* out) {
  return guard([&] {
    require("out is null", out);
    *out = nblab::rho_eval(theta, t);
  });
}

nblab_status nblab_inner_rho_rho(double a, double b, double tol, double* value, double* err) {
  return guard([&] {
    require("output is null", value, err);
    const auto r = nblab::inner_rho_rho(a, b, tol);
    *value = r.value;
    *err = r.err;
  });
}

nblab_status nblab_inner_chi_rho(double theta, double tol, double* value, double* err) {
  return guard([&] {
    require("output is null", value, err);
    const auto r = nblab::inner_chi_rho(theta, tol);
    *value = r.value;
    *err = r.err;
  });
}

nblab_status nblab_norm_rho_sq(double theta, double* value, double* err) {
  return guard([&] {
    require("output is null", value, err);
    const auto r = nblab::norm_rho_sq(theta);
    *value = r.value;
    *err = r.err;
  });
}

nblab_status nblab_distribution_parse(const char* literal, nblab_distribution** out) {
  return guard([&] {
    require("argument is null", literal, out);
    *out = new nblab_distribution{nblab::Distribution::parse(literal)};
  });
}

nblab_status nblab_distribution_clone(const nblab_distribution* d, nblab_distribution** out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = new nblab_distribution{d->value};
  });
}

void nblab_distribution_free(nblab_distribution* d) { delete d; }

nblab_status nblab_distribution_to_string(const nblab_distribution* d, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require("distribution is null", d);
    copy_string(d->value.to_string(), buf, cap, needed);
  });
}

nblab_status nblab_distribution_moment(const nblab_distribution* d, double alpha, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::moment(d->value, alpha);
  });
}

nblab_status nblab_distribution_mean(const nblab_distribution* d, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::mean(d->value);
  });
}

nblab_status nblab_distribution_survival(const nblab_distribution* d, double x, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::survival(d->value, x);
  });
}

nblab_status nblab_distribution_cdf(const nblab_distribution* d, double x, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::cdf(d->value, x);
  });
}

nblab_status nblab_distribution_density_variation(const nblab_distribution* d, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::density_variation(d->value);
  });
}

nblab_status nblab_distribution_sample(const nblab_distribution* d, uint64_t seed, uint64_t stream, size_t count,
                                       uint64_t first_index, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    const auto v = nblab::sample(d->value, nblab::RngStream{seed, stream}, count, first_index);
    std::copy(v.begin(), v.end(), out);
  });
}

nblab_status nblab_mean_beurling(const nblab_distribution* d, double t, nblab_psi_method method, size_t mc_count,
                                 uint64_t seed, unsigned threads, double* value, double* std_error) {
  return guard([&] {
    require("argument is null", d, value);
    nblab::PsiMethod m;
    switch (method) {
      case NBLAB_PSI_CLOSED_FORM:
        m = nblab::PsiMethod::closed_form;
        break;
      case NBLAB_PSI_MUNTZ_SERIES:
        m = nblab::PsiMethod::muntz_series;
        break;
      case NBLAB_PSI_MONTE_CARLO:
        m = nblab::PsiMethod::monte_carlo;
        break;
      case NBLAB_PSI_AUTOMATIC:
        m = nblab::PsiMethod::automatic;
        break;
      default:
        throw InvalidArgument{"unknown Psi method"};
    }
    const auto r = nblab::mean_beurling(d->value, t, m, {mc_count, nblab::RngStream{seed, 0}, threads});
    *value = r.value;
    if (std_error) *std_error = r.stderr_;
  });
}

nblab_status nblab_mean_rho_norm_sq(const nblab_distribution* d, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::mean_rho_norm_sq(d->value);
  });
}

nblab_status nblab_basis_create(nblab_mode mode, nblab_basis** out) {
  return guard([&] {
    require("out is null", out);
    auto* b = new nblab_basis{};
    b->value.mode = to_mode(mode);
    *out = b;
  });
}

nblab_status nblab_basis_preset(const char* name, int n, double scale, double vartheta, int mode, nblab_basis** out) {
  return guard([&] {
    require("argument is null", name, out);
    std::optional<double> s;
    if (scale > 0) s = scale;
    auto* b = new nblab_basis{};
    try {
      b->value.elements = nblab::preset_family(name, n, s, vartheta);
      b->value.mode = mode < 0 ? nblab::preset_default_mode(name) : to_mode(mode);
    } catch (...) {
      delete b;
      throw;
    }
    *out = b;
  });
}

void nblab_basis_free(nblab_basis* b) { delete b; }

nblab_status nblab_basis_add(nblab_basis* b, const nblab_distribution* d) {
  return guard([&] {
    require("argument is null", b, d);
    b->value.elements.push_back(d->value);
  });
}

nblab_status nblab_basis_add_literal(nblab_basis* b, const char* literal) {
  return guard([&] {
    require("argument is null", b, literal);
    b->value.elements.push_back(nblab::Distribution::parse(literal));
  });
}

nblab_status nblab_basis_set_mode(nblab_basis* b, nblab_mode mode) {
  return guard([&] {
    require("basis is null", b);
    b->value.mode = to_mode(mode);
  });
}

nblab_status nblab_basis_get_mode(const nblab_basis* b, nblab_mode* out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = from_mode(b->value.mode);
  });
}

nblab_status nblab_basis_set_independence(nblab_basis* b, int independent) {
  return guard([&] {
    require("basis is null", b);
    b->value.independence = independent != 0;
  });
}

nblab_status nblab_basis_set_target_chi(nblab_basis* b) {
  return guard([&] {
    require("basis is null", b);
    b->value.target = nblab::Target::chi();
  });
}

nblab_status nblab_basis_set_target_survival(nblab_basis* b, const nblab_distribution* d) {
  return guard([&] {
    require("argument is null", b, d);
    b->value.target = nblab::Target::survival(d->value);
  });
}

nblab_status nblab_basis_size(const nblab_basis* b, size_t* out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = b->value.size();
  });
}

nblab_status nblab_basis_element(const nblab_basis* b, size_t index, nblab_distribution** out) {
  return guard([&] {
    require("argument is null", b, out);
    if (index >= b->value.size()) throw InvalidArgument{"basis index out of range"};
    *out = new nblab_distribution{b->value.elements[index]};
  });
}

nblab_status nblab_basis_target_to_string(const nblab_basis* b, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    require("basis is null", b);
    copy_string(b->value.target.to_string(), buf, cap, needed);
  });
}

nblab_status nblab_gram_deterministic(const double* thetas, size_t n, double tol, unsigned threads,
                                      nblab_gram** out) {
  return guard([&] {
    require("argument is null", out);
    if (n > 0) require("thetas is null", thetas);
    if (n == 0) throw nblab::DomainError("deterministic Gram system needs at least one dilation");
    *out = new nblab_gram{nblab::assemble_deterministic({thetas, n}, tol, threads)};
  });
}

nblab_status nblab_gram_assemble(const nblab_basis* b, double tol, unsigned threads, nblab_gram** out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = new nblab_gram{nblab::assemble_random(b->value, tol, threads)};
  });
}

nblab_status nblab_gram_leading(const nblab_gram* g, size_t n, nblab_gram** out) {
  return guard([&] {
    require("argument is null", g, out);
    const auto& s = g->value;
    if (n == 0 || n > s.size()) throw InvalidArgument{"leading size out of range"};
    nblab::GramSystem sub;
    const auto k = static_cast<Eigen::Index>(n);
    sub.g = s.g.topLeftCorner(k, k);
    sub.entry_err = s.entry_err.topLeftCorner(k, k);
    sub.b = s.b.head(k);
    sub.rhs_err = s.rhs_err.head(k);
    sub.target_norm_sq = s.target_norm_sq;
    sub.target_err = s.target_err;
    sub.labels.assign(s.labels.begin(), s.labels.begin() + static_cast<std::ptrdiff_t>(n));
    *out = new nblab_gram{std::move(sub)};
  });
}

void nblab_gram_free(nblab_gram* g) { delete g; }

nblab_status nblab_gram_size(const nblab_gram* g, size_t* out) {
  return guard([&] {
    require("argument is null", g, out);
    *out = g->value.size();
  });
}

nblab_status nblab_gram_entry(const nblab_gram* g, size_t k, size_t l, double* value, double* err) {
  return guard([&] {
    require("argument is null", g, value);
    if (k >= g->value.size() || l >= g->value.size()) throw InvalidArgument{"Gram index out of range"};
    *value = g->value.g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    if (err) *err = g->value.entry_err(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  });
}

nblab_status nblab_gram_rhs(const nblab_gram* g, size_t k, double* value, double* err) {
  return guard([&] {
    require("argument is null", g, value);
    if (k >= g->value.size()) throw InvalidArgument{"Gram index out of range"};
    *value = g->value.b(static_cast<Eigen::Index>(k));
    if (err) *err = g->value.rhs_err(static_cast<Eigen::Index>(k));
  });
}

nblab_status nblab_gram_target_norm_sq(const nblab_gram* g, double* value, double* err) {
  return guard([&] {
    require("argument is null", g, value);
    *value = g->value.target_norm_sq;
    if (err) *err = g->value.target_err;
  });
}

nblab_status nblab_solve(const nblab_gram* g, double cutoff, nblab_report** out) {
  return guard([&] {
    require("argument is null", g, out);
    *out = new nblab_report{nblab::solve(g->value, cutoff)};
  });
}

nblab_status nblab_gnb_distance(const nblab_basis* b, const double* coeffs, size_t n, double tol, unsigned threads,
                                nblab_report** out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = new nblab_report{nblab::gnb_distance(b->value, optional_coeffs(coeffs, n), tol, threads)};
  });
}

nblab_status nblab_pnb_distance(const nblab_basis* b, const double* coeffs, size_t n, double tol, unsigned threads,
                                nblab_report** out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = new nblab_report{nblab::pnb_distance(b->value, optional_coeffs(coeffs, n), tol, threads)};
  });
}

nblab_status nblab_residual(const nblab_gram* g, const double* coeffs, size_t n, double* value, double* slack) {
  return guard([&] {
    require("argument is null", g, value);
    if (n > 0) require("coeffs is null", coeffs);
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs, static_cast<Eigen::Index>(n));
    *value = nblab::residual_with_coeffs(g->value, c);
    if (slack) *slack = nblab::residual_slack(g->value, c);
  });
}

void nblab_report_free(nblab_report* r) { delete r; }

nblab_status nblab_report_distance_sq(const nblab_report* r, double* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.distance_sq;
  });
}

nblab_status nblab_report_raw_distance_sq(const nblab_report* r, double* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.raw_distance_sq;
  });
}

nblab_status nblab_report_slack(const nblab_report* r, double* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.certified_slack;
  });
}

nblab_status nblab_report_condition(const nblab_report* r, double* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.condition_estimate;
  });
}

nblab_status nblab_report_dropped_modes(const nblab_report* r, size_t* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.dropped_modes;
  });
}

nblab_status nblab_report_reg_cutoff(const nblab_report* r, double* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.reg_cutoff;
  });
}

nblab_status nblab_report_clamped(const nblab_report* r, int* out) {
  return guard([&] {
    require("argument is null", r, out);
    *out = r->value.clamped ? 1 : 0;
  });
}

nblab_status nblab_report_coeffs(const nblab_report* r, double* out, size_t cap, size_t* n_out) {
  return guard([&] {
    require("report is null", r);
    const auto n = static_cast<size_t>(r->value.coeffs.size());
    if (n_out) *n_out = n;
    if (out)
      for (size_t i = 0; i < std::min(cap, n); ++i) out[i] = r->value.coeffs(static_cast<Eigen::Index>(i));
  });
}

nblab_status nblab_mobius(int n, int* out) {
  return guard([&] {
    require("out is null", out);
    const auto mu = nblab::mobius_sieve(n);
    std::copy(mu.begin(), mu.end(), out);
  });
}

nblab_status nblab_mobius_coefficients(int n, double epsilon, double* out) {
  return guard([&] {
    require("out is null", out);
    if (n < 1) throw nblab::DomainError("n must be >= 1");
    const auto c = nblab::mobius_coefficients(n, epsilon);
    std::copy(c.begin(), c.end(), out);
  });
}

nblab_status nblab_nu_eval(int n, double epsilon, double tol, unsigned threads, double* value, double* slack) {
  return guard([&] {
    require("value is null", value);
    const auto r = nblab::nu_eval(n, epsilon, tol, threads);
    *value = r.value;
    if (slack) *slack = r.slack;
  });
}

nblab_status nblab_nu_from_gram(const nblab_gram* g, int n, double epsilon, double* value, double* slack) {
  return guard([&] {
    require("argument is null", g, value);
    const auto r = nblab::nu_from_system(g->value, n, epsilon);
    *value = r.value;
    if (slack) *slack = r.slack;
  });
}

nblab_status nblab_assumption_p(const nblab_basis* b, double* out) {
  return guard([&] {
    require("argument is null", b, out);
    *out = nblab::assumption_p(b->value);
  });
}

nblab_status nblab_suffi_bound(const nblab_basis* b, size_t mc_count, uint64_t seed, unsigned threads, double* value,
                               double* mean_abs_log_min, double* std_error) {
  return guard([&] {
    require("argument is null", b, value);
    const auto r = nblab::suffi_bound(b->value, mc_count, nblab::RngStream{seed, 0}, threads);
    *value = r.value;
    if (mean_abs_log_min) *mean_abs_log_min = r.mean_abs_log_min;
    if (std_error) *std_error = r.stderr_;
  });
}

nblab_status nblab_condition_c(const double* coeffs, const size_t* lengths, size_t count, double beta, double* value,
                               int* growing) {
  return guard([&] {
    require("argument is null", value);
    if (count > 0) require("argument is null", coeffs, lengths);
    std::vector<std::vector<double>> by_n;
    size_t offset = 0;
    for (size_t i = 0; i < count; ++i) {
      by_n.emplace_back(coeffs + offset, coeffs + offset + lengths[i]);
      offset += lengths[i];
    }
    const auto r = nblab::condition_c(by_n, beta);
    *value = r.value;
    if (growing) *growing = r.growing ? 1 : 0;
  });
}

nblab_status nblab_moment_growth(const nblab_basis* family, double alpha, double* sup, int* argmax, int* violation) {
  return guard([&] {
    require("argument is null", family, sup);
    const auto rows = nblab::moment_growth(family->value.elements, {alpha});
    *sup = rows[0].sup;
    if (argmax) *argmax = rows[0].argmax;
    if (violation) *violation = rows[0].violation ? 1 : 0;
  });
}

nblab_status nblab_t2_check(const nblab_distribution* target, double m, double* value, double* err) {
  return guard([&] {
    require("value is null", value);
    const auto t = target ? nblab::Target::survival(target->value) : nblab::Target::chi();
    const auto rows = nblab::t2_check(t, {m});
    *value = rows[0].value;
    if (err) *err = rows[0].err;
  });
}

nblab_status nblab_gamma_kn_tail_term(int n, double beta, double m, double* out) {
  return guard([&] {
    require("out is null", out);
    *out = nblab::gamma_kn_tail_term(n, beta, m);
  });
}

nblab_status nblab_muntz_transform(const nblab_distribution* d, double t, double tol, double* out) {
  return guard([&] {
    require("argument is null", d, out);
    *out = nblab::muntz_transform(nblab::KernelSpec::survival_of(d->value), t, tol);
  });
}

nblab_status nblab_muntz_transform_sampled(const double* x, const double* f, size_t n, double t, double tol,
                                           double* out) {
  return guard([&] {
    require("argument is null", x, f, out);
    const auto k = nblab::KernelSpec::sampled(std::vector<double>(x, x + n), std::vector<double>(f, f + n));
    *out = nblab::muntz_transform(k, t, tol);
  });
}

nblab_status nblab_muntz_transform_csv(const char* path, double t, double tol, double* out) {
  return guard([&] {
    require("argument is null", path, out);
    *out = nblab::muntz_transform(nblab::KernelSpec::load_csv(path), t, tol);
  });
}

nblab_status nblab_identity_gap(const nblab_distribution* d, const double* t, size_t nt, size_t mc_count,
                                uint64_t seed, unsigned threads, double* gap, double* std_error, double* mc_mean,
                                double* transform) {
  return guard([&] {
    require("argument is null", d);
    if (nt > 0) require("t is null", t);
    const auto points =
        nblab::identity_gap(d->value, std::vector<double>(t, t + nt), mc_count, nblab::RngStream{seed, 0}, threads);
    for (size_t i = 0; i < nt; ++i) {
      if (gap) gap[i] = points[i].gap;
      if (std_error) std_error[i] = points[i].mc_stderr;
      if (mc_mean) mc_mean[i] = points[i].mc_mean;
      if (transform) transform[i] = points[i].transform;
    }
  });
}

nblab_status nblab_zeta(double re, double im, double* out_re, double* out_im, double* method_gap, int* degraded) {
  return guard([&] {
    require("output is null", out_re, out_im);
    const auto z = nblab::zeta_eval_detail({re, im});
    *out_re = z.value.real();
    *out_im = z.value.imag();
    if (method_gap) *method_gap = z.method_gap;
    if (degraded) *degraded = z.degraded ? 1 : 0;
  });
}

nblab_status nblab_log_gamma(double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    require("output is null", out_re, out_im);
    const auto z = nblab::log_gamma({re, im});
    *out_re = z.real();
    *out_im = z.imag();
  });
}

nblab_status nblab_hardy_z(double t, double* out) {
  return guard([&] {
    require("out is null", out);
    *out = nblab::hardy_z(t);
  });
}

nblab_status nblab_bracket_zero(double lo, double hi, double tol, double* out) {
  return guard([&] {
    require("out is null", out);
    if (!(tol > 0)) throw nblab::DomainError("tol must be positive");
    *out = nblab::bracket_zero(lo, hi, tol);
  });
}

nblab_status nblab_grid_build(double t_max, double step, double fine_step, double fine_until, unsigned threads,
                              nblab_grid** out) {
  return guard([&] {
    require("out is null", out);
    *out = new nblab_grid{nblab::CriticalLineGrid::build(t_max, step, fine_step, fine_until, threads)};
  });
}

nblab_status nblab_grid_cached(const char* path, double t_max, double step, double fine_step, double fine_until,
                               unsigned threads, nblab_grid** out) {
  return guard([&] {
    require("argument is null", path, out);
    *out = new nblab_grid{nblab::CriticalLineGrid::cached(path, t_max, step, fine_step, fine_until, threads)};
  });
}

nblab_status nblab_grid_load(const char* path, nblab_grid** out) {
  return guard([&] {
    require("argument is null", path, out);
    *out = new nblab_grid{nblab::CriticalLineGrid::load_csv(path)};
  });
}

nblab_status nblab_grid_save(const nblab_grid* g, const char* path) {
  return guard([&] {
    require("argument is null", g, path);
    g->value.save_csv(path);
  });
}

void nblab_grid_free(nblab_grid* g) { delete g; }

nblab_status nblab_grid_info(const nblab_grid* g, size_t* points, double* t_max, double* max_method_gap) {
  return guard([&] {
    require("grid is null", g);
    if (points) *points = g->value.t.size();
    if (t_max) *t_max = g->value.t.empty() ? 0.0 : g->value.t.back();
    if (max_method_gap) *max_method_gap = g->value.max_method_gap;
  });
}

nblab_status nblab_plancherel(const nblab_basis* b, const double* coeffs, size_t n, const nblab_grid* g,
                              double* value, double* tail_bound) {
  return guard([&] {
    require("argument is null", b, g, value);
    if (n > 0) require("coeffs is null", coeffs);
    const auto r = nblab::plancherel_residual(b->value, std::vector<double>(coeffs, coeffs + n), g->value);
    *value = r.value;
    if (tail_bound) *tail_bound = r.tail_bound;
  });
}

nblab_status nblab_vn_profile(const nblab_basis* family, double epsilon, const double* t, size_t nt, size_t mc_count,
                              uint64_t seed, unsigned threads, double* mean, double* std_error, double* bound,
                              double* bound_mc) {
  return guard([&] {
    require("argument is null", family);
    if (nt > 0) require("t is null", t);
    const auto& el = family->value.elements;
    const auto points = nblab::vn_profile(static_cast<int>(el.size()), epsilon, el, std::vector<double>(t, t + nt),
                                          mc_count, nblab::RngStream{seed, 0}, threads);
    for (size_t i = 0; i < nt; ++i) {
      if (mean) mean[i] = points[i].mean;
      if (std_error) std_error[i] = points[i].stderr_;
      if (bound) bound[i] = points[i].bound;
      if (bound_mc) bound_mc[i] = points[i].bound_mc;
    }
  });
}

}  // extern "C"
