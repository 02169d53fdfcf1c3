#ifndef FUNREG_PARALLEL_HPP
#define FUNREG_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace funreg {

/// Number of worker threads the OpenMP kernels will use (1 without OpenMP).
inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Caps worker parallelism process-wide. n <= 0 is ignored.
inline void set_thread_cap(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

/// Parallel loop over [0, count). Every iteration must write only to its own
/// output slot so the result is independent of scheduling; reductions are the
/// caller's job and must be done in index order.
template <typename Body>
void parallel_for(std::ptrdiff_t count, const Body& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
#else
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
#endif
}

/// Serial reference used by tests and the kernel benchmark.
template <typename Body>
void serial_for(std::ptrdiff_t count, const Body& body) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

} // namespace funreg

#endif
