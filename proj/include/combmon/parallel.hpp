#pragma once

#include <cstddef>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic data-parallel helpers. Work is split into fixed-size blocks
// that do not depend on the worker count; callers combine block results in
// block order, so serial and parallel runs produce identical bytes.
namespace combmon {

// Global worker cap (0 = OpenMP default). Results never depend on it.
inline int& worker_count_storage() {
  static int n = 0;
  return n;
}
inline void set_worker_count(int n) { worker_count_storage() = n; }
inline int worker_count() { return worker_count_storage(); }

inline void parallel_for(std::ptrdiff_t n,
                         const std::function<void(std::ptrdiff_t)>& body,
                         bool serial = false) {
#ifdef _OPENMP
  if (!serial) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_count() > 0 ? worker_count() : omp_get_max_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  (void)serial;
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace combmon
