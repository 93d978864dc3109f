#pragma once

// Minimal fork-join helper. DEFECT_SPECTRO_THREADS caps the worker count
// (0 or unset = hardware concurrency). Work items write to disjoint indices,
// so results are identical for any thread count.

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace dspec {

inline unsigned thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DEFECT_SPECTRO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
    }
    return hw;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& body) {
    const unsigned workers = thread_cap();
    if (n <= 1 || workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned used = static_cast<unsigned>(n < workers ? n : workers);
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (unsigned t = 0; t < used; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += used) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}
