#ifndef XVA_PARALLEL_HPP
#define XVA_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xva {

// Workers write to disjoint, preallocated slots and all reductions run
// serially in index order, so results are byte-identical for any thread count.

void set_thread_count(int n);  // 0 = runtime default
int thread_count();

template <typename Body>
void parallel_for(std::ptrdiff_t n, const Body& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
#endif
}

template <typename Body>
void serial_for(std::ptrdiff_t n, const Body& body) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace xva

#endif
