#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace nblab {

/// Runs body(i) for i in [0, count) on up to `threads` workers.
///
/// Indices are claimed from a shared counter, so the assignment of indices to
/// threads is not deterministic; callers write results into per-index slots and
/// reduce them afterwards in index order. The first exception thrown by any
/// body is rethrown on the calling thread once all workers have joined.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace nblab
