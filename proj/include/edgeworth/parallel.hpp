#pragma once

#include <cstddef>
#include <functional>

namespace edgeworth {

/// Worker count: EDGEWORTH_THREADS when set to a positive integer, else the
/// number of logical CPUs.
int worker_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Items are
/// claimed dynamically; body must write only to slot i of its outputs.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace edgeworth
