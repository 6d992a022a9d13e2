// Minimal deterministic parallel-for: static partitioning over std::thread,
// results written into caller-owned storage by index.

#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace tiltset::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count) across `threads` workers with a static
/// block partition. Exceptions are captured and rethrown on the caller.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), std::max(count, 1));
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace tiltset::detail
