#include "nblab/basis.hpp"

#include "nblab/errors.hpp"

namespace nblab {

void BasisSpec::validate() const {
  if (elements.empty()) throw DomainError("basis must contain at least one element");
  if (mode == BasisMode::pnb && !independence)
    throw ContractError("pnb distances need the independence assumption for their cross terms");
  if (mode == BasisMode::deterministic)
    for (const auto& d : elements)
      if (!d.is_point_mass()) throw DomainError("deterministic basis element is not a point mass: " + d.to_string());
}

const char* to_string(BasisMode mode) {
  switch (mode) {
    case BasisMode::deterministic:
      return "deterministic";
    case BasisMode::gnb:
      return "gnb";
    case BasisMode::pnb:
      return "pnb";
  }
  return "?";
}

BasisMode parse_basis_mode(const std::string& text) {
  if (text == "deterministic") return BasisMode::deterministic;
  if (text == "gnb") return BasisMode::gnb;
  if (text == "pnb") return BasisMode::pnb;
  throw DataError("unknown basis mode '" + text + "'");
}

}  // namespace nblab
