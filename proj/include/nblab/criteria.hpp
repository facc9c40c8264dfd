#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nblab/basis.hpp"
#include "nblab/gram.hpp"
#include "nblab/mobius.hpp"
#include "nblab/rng.hpp"

namespace nblab {

inline constexpr double kLog4Pi = 2.5310242469692907929389364;
inline constexpr double kBurnolConstant = 2.0 + kEulerGamma - kLog4Pi;
inline constexpr double kDefaultRandomTol = 1e-9;
inline const std::vector<double> kDefaultNuEpsilons = {0.3, 0.2, 0.1, 0.05};

/// c_k = -mu(k) k^-eps, k = 1..n.
std::vector<double> mobius_coefficients(int n, double epsilon);

struct NuResult {
  double value = 0;
  double slack = 0;
};

/// nu_{n,eps} = || chi + sum_{k<=n} mu(k) k^-eps rho_{1/k} ||^2.
NuResult nu_eval(int n, double epsilon, double tol = kDefaultInnerTol, unsigned threads = 1);

/// Same, reusing a deterministic system for thetas 1/k with at least n entries.
NuResult nu_from_system(const GramSystem& bd_system, int n, double epsilon);

/// Gram system of a gnb or pnb basis against its target. Inner products of
/// mean Beurling functions are integrated by adaptive Gauss-Kronrod panels
/// with nodes shared by all entries; on (0, t_f) each Psi_k is replaced by
/// 1/2, which the density variation V_k bounds: |Psi_k(t) - 1/2| <= V_k t / 12.
/// Throws CapabilityError for bases mixing point masses with random laws, for
/// laws with unbounded density, and for point-mass bases with a survival target.
GramSystem assemble_random(const BasisSpec& basis, double tol = kDefaultRandomTol, unsigned threads = 1);

/// D_n^2: projection distance (or the residual of `coeffs` when given).
DistanceReport gnb_distance(const BasisSpec& basis, const std::optional<std::vector<double>>& coeffs = {},
                            double tol = kDefaultRandomTol, unsigned threads = 1);

/// Script-D_n^2 of an independent family. Throws ContractError when the basis
/// does not declare independence.
DistanceReport pnb_distance(const BasisSpec& basis, const std::optional<std::vector<double>>& coeffs = {},
                            double tol = kDefaultRandomTol, unsigned threads = 1);

/// P(Z_1 <= 1, ..., Z_n <= 1) for an independent family.
double assumption_p(const BasisSpec& basis);

struct SuffiResult {
  double value = 0;           // 1 / (log 2 + E|log min_k Z_k|)
  double mean_abs_log_min = 0;
  double stderr_ = 0;         // of mean_abs_log_min; 0 when exact
};

/// Lower-bound proxy for pnb distances. Exact for point-mass bases, Monte
/// Carlo (mc_count >= 1e4, independent streams per element) otherwise.
SuffiResult suffi_bound(const BasisSpec& basis, std::size_t mc_count, const RngStream& rng, unsigned threads = 1);

struct ConditionCResult {
  double value = 0;             // sup over n
  std::vector<double> per_n;    // sum_k c_{k,n}^2 / k^beta for each supplied n
  bool growing = false;         // sup reached in the last tenth and still increasing
};

ConditionCResult condition_c(const std::vector<std::vector<double>>& coeffs_by_n, double beta);

struct MomentGrowthRow {
  double alpha = 0;
  double sup = 0;        // sup_{k <= k_max} k^alpha E Z_k^alpha
  int argmax = 0;
  bool violation = false;  // increasing over the upper half of k and maximal at k_max
};

/// Family is Z_1..Z_{k_max}.
std::vector<MomentGrowthRow> moment_growth(const std::vector<Distribution>& family, const std::vector<double>& alphas);

struct T2Row {
  double m = 0;
  double value = 0;  // M * int_M^inf target^2
  double err = 0;
};

std::vector<T2Row> t2_check(const Target& target, const std::vector<double>& m_grid);

/// n^beta M exp(-(n/2)(M - 2)), the exponential-moment tail term for Gamma(k, n).
double gamma_kn_tail_term(int n, double beta, double m);

/// Named families, k = 1..n:
///   bd            point masses 1/k
///   exp-dilated   Exp(k * scale), scale defaulting to 1
///   gamma-kn      Gamma(k, scale), scale defaulting to n
///   concentrated  squared Gamma(N/k, N/sqrt k), N = scale or n^(3+vartheta)
std::vector<Distribution> preset_family(const std::string& name, int n, std::optional<double> scale = {},
                                        double vartheta = 1.0);

BasisMode preset_default_mode(const std::string& name);

}  // namespace nblab
