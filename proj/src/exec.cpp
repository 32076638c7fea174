#include "suge/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace suge {

int default_thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace suge
