#pragma once

#include <cstddef>
#include <functional>

namespace fintime {

// Worker cap for data-parallel sweeps.  0 means hardware concurrency.
// Results never depend on this value: every parallel loop writes into a
// pre-sized slot per index and reduces sequentially afterwards.
void set_max_threads(unsigned n);
unsigned max_threads();

namespace detail {

// Runs fn(i) for i in [0, count).  Deterministic partitioning by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace detail
}  // namespace fintime
