#pragma once

#include <cstddef>
#include <functional>

namespace gfbm {

// Worker cap for parallel_for; 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs f(i) for i in [0, n). Work items must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace gfbm
