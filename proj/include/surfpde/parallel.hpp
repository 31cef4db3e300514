#pragma once

#include <cstddef>
#include <functional>

namespace surfpde {

/// Number of worker threads used by data-parallel loops. Initialized from
/// SURFPDE_THREADS when set, otherwise hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Exceptions thrown by body are rethrown on
/// the calling thread (the one with the smallest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace surfpde
