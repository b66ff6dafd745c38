#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hm {

/// Execution mode for data-parallel batch kernels. The serial path is the
/// reference implementation; the OpenMP path must produce bit-identical
/// results (each index writes its own slot, no shared reductions).
enum class ExecMode { serial, openmp };

inline ExecMode default_exec() {
#ifdef _OPENMP
    return ExecMode::openmp;
#else
    return ExecMode::serial;
#endif
}

template <class F>
void for_each_index(std::size_t n, ExecMode mode, F&& fn) {
    if (mode == ExecMode::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace hm
