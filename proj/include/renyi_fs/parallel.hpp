#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#ifdef RENYI_FS_HAVE_OPENMP
#include <omp.h>
#endif

namespace renyi_fs {

/// Worker cap from RENYI_SELECT_THREADS; 0 or unset means "auto".
inline int worker_count() {
  int requested = 0;
  if (const char *env = std::getenv("RENYI_SELECT_THREADS")) {
    try {
      requested = std::stoi(env);
    } catch (const std::exception &) {
      requested = 0;
    }
  }
#ifdef RENYI_FS_HAVE_OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on scheduling. The first exception thrown by
/// any body is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t count, Body &&body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#ifdef RENYI_FS_HAVE_OPENMP
  const int workers = worker_count();
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1 && count > 1)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace renyi_fs
