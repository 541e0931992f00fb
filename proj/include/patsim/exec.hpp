#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace patsim {

// Execution policy for the grid kernels. Every parallel kernel has the
// serial path as its reference; results must be bit-identical because each
// element is computed independently (no cross-element reductions).
enum class Exec { serial, parallel };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

template <class F>
void parallel_for(std::ptrdiff_t n, Exec exec, F&& body) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(i);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(i);
        }
    }
}

} // namespace patsim
