#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace srmax {

// Runs task(i) for i in [0, count) and returns the results in index order.
// The parallel path spreads trials over OpenMP threads; because every trial
// owns its inputs and the merge is by index, its output is identical to the
// serial path. The serial path is the reference the tests compare against.
template <typename T>
std::vector<T> run_indexed(std::size_t count, const std::function<T(std::size_t)>& task,
                           bool parallel = true) {
  std::vector<T> results(count);
#if defined(_OPENMP)
  if (parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      try {
        results[static_cast<std::size_t>(i)] = task(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        {
          if (!failure) failure = std::current_exception();
        }
      }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < count; ++i) {
    results[i] = task(i);
  }
  return results;
}

}  // namespace srmax
