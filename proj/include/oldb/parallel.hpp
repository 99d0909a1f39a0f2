#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oldb {

// Worker count; honours OLDB_THREADS when set. Reductions never depend on it.
inline int configure_threads_from_env() {
  int n = 0;
  if (const char* s = std::getenv("OLDB_THREADS")) n = std::atoi(s);
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
  return omp_get_max_threads();
#else
  (void)n;
  return 1;
#endif
}

inline int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace oldb
