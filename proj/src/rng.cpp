#include "nblab/rng.hpp"

#include <cmath>

#include "nblab/numeric.hpp"

namespace nblab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream{seed, splitmix64(stream_id ^ splitmix64(id + 0x632BE59BD9B4E019ULL))};
}

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t index, std::uint32_t sub) const {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream_id));
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::array<std::uint32_t, 4> c = {static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32), sub, 0x5EED5EEDu};
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return c;
}

std::array<double, 2> RngStream::uniform_pair(std::uint64_t index, std::uint32_t sub) const {
  const auto c = block(index, sub);
  return {to_open_unit(c[0], c[1]), to_open_unit(c[2], c[3])};
}

double RngStream::normal(std::uint64_t index, std::uint32_t sub) const {
  const auto u = uniform_pair(index, sub);
  return std::sqrt(-2.0 * std::log(u[0])) * std::cos(2.0 * kPi * u[1]);
}

}  // namespace nblab
