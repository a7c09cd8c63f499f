#pragma once

#ifdef _OPENMP
#include <omp.h>
#define GAPCERT_OMP(content) _Pragma(content)
#else
#define GAPCERT_OMP(content)
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline void omp_set_num_threads(int) {}
#endif

namespace gapcert {

// Kernels that have both variants take this tag; Serial is the reference.
enum class Exec { Serial, Parallel };

}  // namespace gapcert
