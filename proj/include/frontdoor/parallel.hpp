#ifndef FRONTDOOR_PARALLEL_HPP
#define FRONTDOOR_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace frontdoor {

// Thread count from FRONTDOOR_THREADS, else hardware concurrency, at least 1.
std::size_t default_threads();

// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = default).
// Work items must write only to their own slots; the first exception thrown
// is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

}  // namespace frontdoor

#endif  // FRONTDOOR_PARALLEL_HPP
