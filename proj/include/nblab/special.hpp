#pragma once

#include <complex>

namespace nblab {

using cplx = std::complex<double>;

/// log Gamma(z) for Re(z) > 0, on the branch that is continuous in the right
/// half-plane and real on the positive axis.
///
/// Lanczos approximation (g = 7, nine stored coefficients, about 15 digits)
/// applied for Re(z) >= 1/2; smaller real parts use log Gamma(z) = log Gamma(z+1) - log z.
cplx log_gamma(cplx z);

}  // namespace nblab
