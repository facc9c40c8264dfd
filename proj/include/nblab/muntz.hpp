#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "nblab/distribution.hpp"
#include "nblab/numeric.hpp"
#include "nblab/rng.hpp"

namespace nblab {

inline constexpr double kDefaultMuntzTol = 1e-10;

/// Nonincreasing kernel given at grid points, linear in between and zero
/// beyond the last point (which must therefore carry f = 0).
struct SampledKernel {
  std::vector<double> x;
  std::vector<double> f;
};

/// A good kernel f: either the survival function of a law or a sampled grid.
class KernelSpec {
 public:
  static KernelSpec survival_of(const Distribution& d) { return KernelSpec(d); }

  /// Throws DataError unless x is strictly increasing from x[0] >= 0 and f is
  /// finite, nonnegative and nonincreasing.
  static KernelSpec sampled(std::vector<double> x, std::vector<double> f);

  /// Reads a two-column CSV `x,f`; an optional header line is skipped.
  static KernelSpec load_csv(const std::string& path);

  bool is_sampled() const { return std::holds_alternative<SampledKernel>(data_); }
  const std::variant<Distribution, SampledKernel>& data() const { return data_; }

  double operator()(double x) const;

  /// Integral of f over (0, inf). For a sampled kernel err bounds the gap to
  /// any nonincreasing function through the grid points.
  BracketedValue integral() const;

 private:
  explicit KernelSpec(Distribution d) : data_(std::move(d)) {}
  explicit KernelSpec(SampledKernel k) : data_(std::move(k)) {}
  std::variant<Distribution, SampledKernel> data_;
};

/// Pf(t) = sum_{k >= 1} f(kt) - (1/t) int_0^inf f, truncated once the
/// remaining tail (1/t) int_{Nt}^inf f is below tol.
double muntz_transform(const KernelSpec& kernel, double t, double tol = kDefaultMuntzTol);

struct IdentityGapPoint {
  double t = 0;
  double gap = 0;        // |MC E{X/t} + Pf(t)|
  double mc_stderr = 0;
  double mc_mean = 0;
  double transform = 0;  // Pf(t)
};

/// Monte Carlo check of E{X/t} = -Pf(t) with f the survival function of d.
/// Every grid point reuses the same draws. mc_count must be at least 1e4.
std::vector<IdentityGapPoint> identity_gap(const Distribution& d, const std::vector<double>& t_grid,
                                           std::size_t mc_count, const RngStream& rng, unsigned threads = 1);

}  // namespace nblab
