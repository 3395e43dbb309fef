#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qpbbm {

/// Worker count: hardware concurrency, capped by the QPBBM_THREADS env var.
inline unsigned max_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* cap = std::getenv("QPBBM_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

/// Runs fn(i) for i in [0, count). Each index writes only its own slot, so the
/// result is identical regardless of the thread count.
template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
    const unsigned workers = std::min<size_t>(max_threads(), count);
    if (workers <= 1 || count < 64) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace qpbbm
