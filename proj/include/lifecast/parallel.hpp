#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lifecast {

// Resolves a requested thread count: positive values are taken as-is,
// zero or negative fall back to the runtime default.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace lifecast
