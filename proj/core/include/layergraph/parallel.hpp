#pragma once

#include <cstddef>
#include <functional>

namespace layergraph {

/// Worker count: LAYERGRAPH_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least one).
std::size_t thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads, in
/// contiguous chunks. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace layergraph
