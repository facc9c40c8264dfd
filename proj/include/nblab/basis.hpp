#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nblab/distribution.hpp"

namespace nblab {

enum class BasisMode { deterministic, gnb, pnb };

/// Target function of an approximation problem: chi = 1_(0,1], or the
/// survival function t -> P(X >= t) of a law.
struct Target {
  std::optional<Distribution> survival_of;

  static Target chi() { return {}; }
  static Target survival(const Distribution& d) { return {d}; }
  bool is_chi() const { return !survival_of.has_value(); }
  std::string to_string() const { return is_chi() ? "chi" : "survival:" + survival_of->to_string(); }
};

/// Ordered family of dilation laws Z_1..Z_n and how they enter the distance.
///
/// deterministic: every element is a point mass and contributes rho_theta.
/// gnb: element k contributes the mean Beurling function Psi_{Z_k}.
/// pnb: the squared error is averaged over the joint law, taken as independent.
struct BasisSpec {
  std::vector<Distribution> elements;
  BasisMode mode = BasisMode::deterministic;
  bool independence = true;
  Target target = Target::chi();

  std::size_t size() const { return elements.size(); }

  /// Throws ContractError for pnb without independence, DomainError for an
  /// empty basis or a deterministic basis with a non point mass.
  void validate() const;
};

const char* to_string(BasisMode mode);
BasisMode parse_basis_mode(const std::string& text);

}  // namespace nblab
