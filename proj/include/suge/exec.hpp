#pragma once

#include <cstddef>
#include <exception>

namespace suge {

/// Thread budget for the per-sample kernels. `threads == 1` runs every kernel
/// serially and is the reproducibility mode.
struct ExecPolicy {
    int threads = 1;

    bool parallel() const noexcept { return threads > 1; }
    static ExecPolicy serial() noexcept { return {1}; }
};

/// Number of threads OpenMP would use by default (1 without OpenMP).
int default_thread_count();

/// Runs fn(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, ExecPolicy exec, Fn&& fn) {
    std::exception_ptr error;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(exec.threads) if (exec.parallel())
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(suge_parallel_for_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace suge
