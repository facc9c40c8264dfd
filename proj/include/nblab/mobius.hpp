#pragma once

#include <vector>

namespace nblab {

/// mu(1..n) by a linear sieve; entry k - 1 holds mu(k).
std::vector<int> mobius_sieve(int n);

}  // namespace nblab
