#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nblab/basis.hpp"
#include "nblab/rng.hpp"
#include "nblab/special.hpp"

namespace nblab {

/// Largest |Im s| at which both zeta methods are evaluated and compared.
inline constexpr double kZetaValidatedHeight = 50.0;
/// Largest |Im s| accepted at all.
inline constexpr double kZetaMaxHeight = 1e4;
inline constexpr double kZetaAgreementTol = 1e-8;

struct ZetaValue {
  cplx value;
  double method_gap = 0;   // |alternating series - Euler-Maclaurin|, when both were run
  bool cross_checked = false;
  bool degraded = false;   // gap above kZetaAgreementTol, or height beyond the validated range
};

/// zeta(s) for 0 < Re s <= 2, s != 1, from the accelerated alternating series
/// for (1 - 2^(1-s)) zeta(s), checked against Euler-Maclaurin summation for
/// |Im s| <= kZetaValidatedHeight. Throws PoleError at s = 1.
ZetaValue zeta_eval_detail(cplx s);

inline cplx zeta_eval(cplx s) { return zeta_eval_detail(s).value; }

/// Euler-Maclaurin evaluation with n_terms direct terms and m correction terms.
cplx zeta_euler_maclaurin(cplx s, std::size_t n_terms, int m);

/// Riemann-Siegel theta function.
double siegel_theta(double t);

/// Hardy's Z(t) = e^{i theta(t)} zeta(1/2 + it), real for real t.
double hardy_z(double t);

/// Zero of Z in [lo, hi] by bisection; throws DomainError without a sign change.
double bracket_zero(double lo, double hi, double tol = 1e-12);

/// zeta(1/2 + it) on a grid of t in [0, t_max]; negative t follow from
/// conjugate symmetry.
struct CriticalLineGrid {
  double t_max = 0;
  double step = 0;       // spacing on [fine_until, t_max]
  double fine_step = 0;  // spacing on [0, fine_until]
  double fine_until = 0;
  std::vector<double> t;
  std::vector<cplx> zeta;
  double max_method_gap = 0;  // over the cross-checked part of the grid

  static CriticalLineGrid build(double t_max = 5000.0, double step = 0.05, double fine_step = 0.005,
                                double fine_until = 2.0, unsigned threads = 1);

  /// CSV `t,re,im` with `#` metadata lines.
  void save_csv(const std::string& path) const;
  static CriticalLineGrid load_csv(const std::string& path);

  /// Loads `path` if it exists and matches the parameters, otherwise builds
  /// and saves it there.
  static CriticalLineGrid cached(const std::string& path, double t_max, double step, double fine_step,
                                 double fine_until, unsigned threads);
};

struct PlancherelResult {
  double value = 0;       // (1/2pi) int_{-T}^{T} |residual Mellin image|^2
  double tail_bound = 0;  // envelope bound on the part beyond |t| = T
  double envelope_a = 0;  // max |zeta(1/2+it)| / t^eta on [1, T]
  double eta = 0.25;
};

/// Squared distance between the target and sum_k c_k phi_k on the Mellin
/// side. Deterministic and gnb bases only.
PlancherelResult plancherel_residual(const BasisSpec& basis, const std::vector<double>& coeffs,
                                     const CriticalLineGrid& grid);

struct VnPoint {
  double t = 0;
  double mean = 0;      // Monte Carlo E V_n(t)
  double stderr_ = 0;
  double bound = 0;     // 4 n sum_k E(k^-1/2 - sqrt X_k)^2 |zeta|^2, exact moments
  double bound_mc = 0;  // same bound averaged over the draws used for `mean`
};

/// Monte Carlo profile of
/// V_n(t) = |sum_k mu(k) k^-eps (k^-s - X_k^s) zeta(s)/s|^2, s = 1/2 + it,
/// with X_k independent (one stream per k). mc_count must be at least 1e3.
std::vector<VnPoint> vn_profile(int n, double epsilon, const std::vector<Distribution>& family,
                                const std::vector<double>& t_grid, std::size_t mc_count, const RngStream& rng,
                                unsigned threads = 1);

}  // namespace nblab
