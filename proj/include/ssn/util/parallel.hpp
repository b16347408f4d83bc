#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ssn {

// Resolves a --jobs value: 0 means "all hardware threads".
inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into `jobs` contiguous chunks and runs fn(begin, end) on each.
// Chunk boundaries depend only on n and jobs. The first exception thrown by a
// worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        threads.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

// Pairwise (fixed binary tree) reduction over [begin, end). The summation
// order depends only on the element count, so results are bit-identical no
// matter how the values were produced.
template <typename T, typename Get>
T pairwise_reduce(std::size_t begin, std::size_t end, Get&& get) {
    const std::size_t n = end - begin;
    if (n == 0) return T{};
    if (n == 1) return get(begin);
    const std::size_t mid = begin + n / 2;
    return pairwise_reduce<T>(begin, mid, get) + pairwise_reduce<T>(mid, end, get);
}

}  // namespace ssn
