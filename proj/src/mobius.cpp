#include "nblab/mobius.hpp"

#include "nblab/errors.hpp"

namespace nblab {

std::vector<int> mobius_sieve(int n) {
  if (n < 1) throw DomainError("mobius_sieve: n must be >= 1");
  std::vector<int> mu(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> primes;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  mu[1] = 1;
  for (int i = 2; i <= n; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (int p : primes) {
      const long long ip = static_cast<long long>(i) * p;
      if (ip > n) break;
      composite[ip] = true;
      if (i % p == 0) {
        mu[ip] = 0;
        break;
      }
      mu[ip] = -mu[i];
    }
  }
  return {mu.begin() + 1, mu.end()};
}

}  // namespace nblab
