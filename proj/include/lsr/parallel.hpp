#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lsr {

// Thread budget for all parallel kernels. 0 = hardware default.
void set_threads(int n);
int thread_count();

// Data-parallel loop over [0, n). Bodies must write only to disjoint slots;
// reductions are done by the caller in fixed order so results do not depend
// on the thread count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

// Same loop, dynamic schedule, for workloads with uneven cost per item.
template <class F>
void parallel_for_dynamic(std::size_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference loop, kept for testing kernels against their parallel twins.
template <class F>
void serial_for(std::size_t n, F&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Parallel loop whose body may throw (metric evaluations can exit the chart).
// The first exception is captured and rethrown after the region joins.
template <class F>
void parallel_for_except(std::size_t n, F&& body) {
  std::exception_ptr err;
  std::mutex mu;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
#else
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      if (!err) err = std::current_exception();
      break;
    }
  }
#endif
  if (err) std::rethrow_exception(err);
}

}  // namespace lsr
