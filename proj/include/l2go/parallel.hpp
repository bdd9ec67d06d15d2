#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace l2go {

enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n). body must only write state owned by
// iteration i; reductions are folded serially by the caller afterwards, so
// results do not depend on the thread count or schedule.
template <class F>
void parallel_for(std::size_t n, F&& body, Exec exec = Exec::parallel) {
#ifdef _OPENMP
  if (exec == Exec::parallel && n > 1) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  (void)exec;
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace l2go
