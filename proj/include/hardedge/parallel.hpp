#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace hardedge {

namespace detail {
inline std::atomic<unsigned>& worker_override() {
    static std::atomic<unsigned> value{0};
    return value;
}
}  // namespace detail

/// Forces the worker count (0 restores the default). Results never depend on
/// it; the reproducibility check uses it to rerun under a different schedule.
inline void set_worker_override(unsigned workers) { detail::worker_override().store(workers); }

/// Worker count: the override if set, else HARDEDGE_WORKERS if positive,
/// else hardware_concurrency.
inline unsigned worker_count() {
    if (const unsigned forced = detail::worker_override().load()) return forced;
    if (const char* env = std::getenv("HARDEDGE_WORKERS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value > 0) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, count) on a pool of workers and returns the
/// results in index order. Tasks are claimed dynamically, but since results
/// are stored by index (and each task derives its randomness from i alone)
/// the output does not depend on scheduling. The first exception thrown by
/// any task is rethrown after all workers stop.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    static_assert(!std::is_same_v<Result, bool>, "vector<bool> is not safe for concurrent writes");
    std::vector<Result> results(count);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace hardedge
