#pragma once

#include <omp.h>

#include <cstddef>
#include <exception>
#include <limits>

namespace fcq {

inline int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

/// Runs fn(i) for i in [0, count) on a dynamically scheduled team. Exceptions
/// are captured per task and the one with the smallest index is rethrown, so
/// failures are reported the same way for every worker count.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn, int chunk = 1) {
  std::exception_ptr failure;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, chunk) num_threads(resolve_workers(workers))
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fcq_parallel_for)
      if (static_cast<std::size_t>(i) < failed_at) {
        failed_at = static_cast<std::size_t>(i);
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fcq
