#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ippsz
{

// Which implementation of a trial-parallel kernel to run. The serial path is
// the reference; the OpenMP path must reproduce it exactly.
enum class Exec
{
    serial,
    openmp,
};

inline int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads( int n )
{
#ifdef _OPENMP
    if ( n > 0 )
        omp_set_num_threads( n );
#else
    (void)n;
#endif
}

} // namespace ippsz
