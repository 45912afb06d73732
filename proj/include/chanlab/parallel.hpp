#pragma once
// Column-parallel loops over independent work items.

#include <cstddef>
#include <functional>

namespace chanlab {

// 0 restores the default (CHANNEL_LAB_THREADS, else hardware concurrency).
void set_thread_count(int n);
int thread_count();

// Calls fn(i) for i in [0, n). Items must not share mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace chanlab
