#include "lsr/parallel.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lsr {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int n) {
  g_threads = std::max(0, n);
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

int thread_count() {
#ifdef _OPENMP
  int n = g_threads.load();
  return n > 0 ? n : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace lsr
