#pragma once

// Trial-level parallelism.
//
// Monte Carlo trials are independent, so the harness runs them through
// for_each_index. Each index writes only its own output slot and callers
// reduce the slots in index order afterwards; the aggregate is therefore
// bit-identical whatever the worker count. threads == 1 takes the plain
// serial loop, which is kept as the reference path for tests and benchmarks.

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace coac {

/// max(1, requested), capped by COAC_THREADS when that is a positive integer.
int capped_worker_count(int requested);

/// capped_worker_count(omp_get_max_threads()).
int default_worker_count();

template <typename Fn>
void for_each_index_serial(std::size_t count, Fn&& fn)
{
    for (std::size_t i = 0; i < count; ++i) {
        fn(i);
    }
}

/// OpenMP version. The exception from the lowest failing index is rethrown
/// so error reporting is deterministic too.
template <typename Fn>
void for_each_index_parallel(std::size_t count, int threads, Fn&& fn)
{
    std::exception_ptr first_error;
    std::size_t first_index = count;
    std::mutex guard;
    const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < total; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            if (static_cast<std::size_t>(i) < first_index) {
                first_index = static_cast<std::size_t>(i);
                first_error = std::current_exception();
            }
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

template <typename Fn>
void for_each_index(std::size_t count, int threads, Fn&& fn)
{
    if (threads <= 1 || count <= 1) {
        for_each_index_serial(count, fn);
    } else {
        for_each_index_parallel(count, threads, fn);
    }
}

} // namespace coac
