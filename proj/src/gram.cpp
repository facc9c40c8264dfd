#include "nblab/gram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nblab/errors.hpp"
#include "nblab/parallel.hpp"

namespace nblab {

void GramSystem::validate() const {
  const auto n = b.size();
  if (n == 0) throw DataError("empty Gram system");
  if (g.rows() != n || g.cols() != n || entry_err.rows() != n || entry_err.cols() != n ||
      rhs_err.size() != n)
    throw DataError("Gram system has inconsistent dimensions");
  if (!std::isfinite(target_norm_sq) || !(target_norm_sq > 0.0))
    throw DataError("target norm must be positive and finite");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!std::isfinite(b(k))) throw DataError("non-finite right-hand side entry");
    if (!(g(k, k) > 0.0)) throw DataError("Gram diagonal must be strictly positive");
    for (Eigen::Index l = 0; l < n; ++l) {
      if (!std::isfinite(g(k, l))) throw DataError("non-finite Gram entry");
      if (g(k, l) != g(l, k)) throw DataError("Gram matrix is not symmetric");
    }
  }
}

GramSystem assemble_deterministic(std::span<const double> thetas, double tol, unsigned threads) {
  if (thetas.empty()) throw DomainError("assemble_deterministic: empty list of dilations");
  for (double t : thetas)
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("dilations must be positive");

  const auto n = static_cast<Eigen::Index>(thetas.size());
  GramSystem sys;
  sys.g.resize(n, n);
  sys.entry_err.resize(n, n);
  sys.b.resize(n);
  sys.rhs_err.resize(n);
  sys.target_norm_sq = 1.0;
  sys.target_err = 0.0;

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k; l < n; ++l) pairs.emplace_back(k, l);

  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const auto [k, l] = pairs[i];
    const auto v = inner_rho_rho(thetas[k], thetas[l], tol);
    sys.g(k, l) = sys.g(l, k) = v.value;
    sys.entry_err(k, l) = sys.entry_err(l, k) = v.err;
  });
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto v = inner_chi_rho(thetas[k], tol);
    sys.b(k) = v.value;
    sys.rhs_err(k) = v.err;
    std::ostringstream os;
    os.precision(17);
    os << "rho(" << thetas[k] << ")";
    sys.labels.push_back(os.str());
  }
  return sys;
}

DistanceReport solve(const GramSystem& sys, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff < 1.0)) throw DomainError("eigenvalue cutoff must lie in [0, 1)");
  sys.validate();
  const auto n = static_cast<Eigen::Index>(sys.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.g);
  if (eig.info() != Eigen::Success) throw DataError("eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  const double lambda_max = lambda(n - 1);
  if (!(lambda_max > 0.0)) throw DataError("Gram matrix has no positive eigenvalue");
  const double threshold = cutoff * lambda_max;

  DistanceReport rep;
  rep.reg_cutoff = cutoff;
  rep.coeffs = Eigen::VectorXd::Zero(n);
  long double explained = 0.0L;
  double lambda_min_kept = lambda_max;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambda(i) > threshold)) {
      ++rep.dropped_modes;
      continue;
    }
    const double proj = vecs.col(i).dot(sys.b);
    rep.coeffs += (proj / lambda(i)) * vecs.col(i);
    explained += static_cast<long double>(proj) * proj / lambda(i);
    lambda_min_kept = std::min(lambda_min_kept, lambda(i));
  }
  rep.condition_estimate = lambda_max / lambda_min_kept;
  rep.raw_distance_sq = static_cast<double>(static_cast<long double>(sys.target_norm_sq) - explained);
  rep.certified_slack = residual_slack(sys, rep.coeffs);
  rep.distance_sq = rep.raw_distance_sq;
  if (rep.distance_sq < 0.0) {
    rep.distance_sq = 0.0;
    rep.clamped = true;
  }
  return rep;
}

double residual_with_coeffs(const GramSystem& sys, const Eigen::VectorXd& coeffs) {
  sys.validate();
  if (coeffs.size() != static_cast<Eigen::Index>(sys.size())) {
    std::ostringstream os;
    os << "coefficient vector has length " << coeffs.size() << ", basis has " << sys.size();
    throw DataError(os.str());
  }
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    if (!std::isfinite(coeffs(k))) throw DataError("non-finite coefficient");

  const auto n = coeffs.size();
  long double quad = 0.0L, lin = 0.0L;
  for (Eigen::Index k = 0; k < n; ++k) {
    lin += static_cast<long double>(sys.b(k)) * coeffs(k);
    long double row = 0.0L;
    for (Eigen::Index l = 0; l < n; ++l) row += static_cast<long double>(sys.g(k, l)) * coeffs(l);
    quad += row * coeffs(k);
  }
  return static_cast<double>(static_cast<long double>(sys.target_norm_sq) - 2.0L * lin + quad);
}

double residual_slack(const GramSystem& sys, const Eigen::VectorXd& coeffs) {
  const double c1 = coeffs.lpNorm<1>();
  const double max_g = sys.entry_err.size() ? sys.entry_err.maxCoeff() : 0.0;
  const double max_b = sys.rhs_err.size() ? sys.rhs_err.maxCoeff() : 0.0;
  return c1 * c1 * max_g + 2.0 * c1 * max_b + sys.target_err;
}

}  // namespace nblab
