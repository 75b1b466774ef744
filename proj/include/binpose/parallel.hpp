#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace binpose {

inline int hardware_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n). jobs < 1 means "use all hardware threads",
// jobs == 1 runs inline. Bodies must only write to per-index state; the first
// exception thrown by any body is rethrown on the calling thread.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  if (n == 0) return;
#ifdef _OPENMP
  if (jobs != 1) {
    const int threads = jobs < 1 ? omp_get_max_threads() : jobs;
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(binpose_parallel_for_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#else
  (void)jobs;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace binpose
