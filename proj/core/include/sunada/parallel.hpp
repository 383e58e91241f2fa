#pragma once

#include <cstddef>
#include <functional>

namespace sunada {

/// Worker count: hardware concurrency, capped by SUNADA_ZETA_THREADS when set.
std::size_t max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() workers.
/// Results must be written to per-index slots so the merge order stays fixed.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sunada
