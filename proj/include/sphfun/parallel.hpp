#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "types.hpp"

namespace sphfun {

// Worker cap: SPHFUN_THREADS if set, else hardware concurrency.
inline int thread_budget() {
    if (const char* env = std::getenv("SPHFUN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 1024)
            throw validation_error("SPHFUN_THREADS must be an integer in [1, 1024]");
        return int(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

// Applies fn to 0..n-1 and collects results by input slot, so the output
// order (and therefore any serialized report) is independent of the worker
// count.  The first captured exception is rethrown after the join.
template <class F>
auto parallel_map(int n, F&& fn) -> std::vector<decltype(fn(0))> {
    using R = decltype(fn(0));
    std::vector<R> out(size_t(std::max(n, 0)));
    if (n <= 0) return out;
    const int workers = std::min(thread_budget(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) out[size_t(i)] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errs{size_t(workers)};
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    out[size_t(i)] = fn(i);
            } catch (...) {
                if (!errs[size_t(w)]) errs[size_t(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace sphfun
