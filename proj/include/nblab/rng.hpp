#pragma once

#include <array>
#include <cstdint>

namespace nblab {

/// Reproducible random stream. Draw i of a stream is a pure function of
/// (seed, stream_id, i), so results do not depend on how draws are split
/// across threads.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t id) const;

  /// Philox4x32-10 block for counter (index, sub).
  std::array<std::uint32_t, 4> block(std::uint64_t index, std::uint32_t sub) const;

  /// Two independent uniforms in (0, 1) from block (index, sub).
  std::array<double, 2> uniform_pair(std::uint64_t index, std::uint32_t sub) const;

  double uniform(std::uint64_t index, std::uint32_t sub) const { return uniform_pair(index, sub)[0]; }

  /// Standard normal by Box-Muller on uniform_pair(index, sub).
  double normal(std::uint64_t index, std::uint32_t sub) const;
};

}  // namespace nblab
