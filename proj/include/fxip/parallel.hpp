#pragma once

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fxip {

/// Worker count for OpenMP kernels; the FXIP_THREADS environment
/// variable caps it.  Results never depend on this value, only speed.
inline int worker_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("FXIP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, n);
#else
    return 1;
#endif
}

} // namespace fxip
