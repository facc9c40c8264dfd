#include "nblab/special.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "nblab/errors.hpp"
#include "nblab/numeric.hpp"

namespace nblab {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos_log_gamma(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

cplx log_gamma(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("log_gamma: non-finite argument");
  if (!(z.real() > 0.0)) {
    std::ostringstream os;
    if (z.imag() == 0.0 && z.real() == std::floor(z.real()))
      os << "log_gamma: pole at " << z.real();
    else
      os << "log_gamma: argument " << z << " outside Re(z) > 0";
    throw DomainError(os.str());
  }
  if (z.real() >= 0.5) return lanczos_log_gamma(z);
  return lanczos_log_gamma(z + 1.0) - std::log(z);
}

}  // namespace nblab
