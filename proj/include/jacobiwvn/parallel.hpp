#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace jacobiwvn {

// Worker count for internal sweeps: hardware concurrency capped by the
// JACOBI_WVN_THREADS environment variable (values < 1 mean serial).
inline int sweep_thread_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("JACOBI_WVN_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && cap < 1024) n = std::min<long>(n, cap);
        if (end != env && cap < 1) n = 1;
    }
    return n;
}

// Index-parallel for loop; results must be written by index so the outcome is
// deterministic regardless of the worker count.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    const int workers = std::min<std::int64_t>(sweep_thread_count(), count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace jacobiwvn
