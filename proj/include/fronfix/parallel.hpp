#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace fronfix {

/// Worker count: FRONFIX_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_budget();

/// Applies `fn` to every element and returns results in input order,
/// whichever worker finished first. The first exception thrown by any call
/// is rethrown after all workers stop.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& items, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
    using R = std::invoke_result_t<Fn&, const T&>;
    const std::size_t n = items.size();
    std::vector<R> out(n);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(thread_budget(), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(items[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(items[i]);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace fronfix
