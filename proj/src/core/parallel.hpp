#pragma once

// Static-chunked parallel loop. Callers write results into per-index slots
// and reduce serially, so outputs never depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace benjamin {

inline std::atomic<int>& thread_setting()
{
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) { thread_setting() = std::max(1, n); }
inline int thread_count() { return thread_setting(); }

template <class F>
void parallel_for(std::size_t n, F&& body)
{
    const auto workers = static_cast<std::size_t>(std::min<long long>(thread_count(), static_cast<long long>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            try {
                for (std::size_t i = begin; i < end; ++i)
                    body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

/// Pairwise (tree) sum; the association order depends only on the length.
template <class T>
T pairwise_sum(const T* data, std::size_t n)
{
    if (n == 0)
        return T{};
    if (n <= 8) {
        T s = data[0];
        for (std::size_t i = 1; i < n; ++i)
            s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace benjamin
