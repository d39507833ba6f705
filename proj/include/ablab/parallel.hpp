#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ablab {

namespace detail {
inline unsigned& worker_override() {
    static unsigned value = 0;
    return value;
}
}  // namespace detail

/// Pins the worker count for the lifetime of the object (0 restores the default).
class ScopedWorkers {
public:
    explicit ScopedWorkers(unsigned n) : previous_(detail::worker_override()) { detail::worker_override() = n; }
    ~ScopedWorkers() { detail::worker_override() = previous_; }
    ScopedWorkers(const ScopedWorkers&) = delete;
    ScopedWorkers& operator=(const ScopedWorkers&) = delete;

private:
    unsigned previous_;
};

/// Worker count: a ScopedWorkers pin, else $ABLAB_THREADS, else hardware concurrency.
inline unsigned worker_count() {
    if (detail::worker_override() > 0) return detail::worker_override();
    if (const char* env = std::getenv("ABLAB_THREADS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value > 0) return static_cast<unsigned>(value);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs body(i) for i in [0, n) over contiguous chunks. Each index is written by
/// exactly one worker, so callers collect per-replica results into a pre-sized
/// vector and reduce it afterwards in index order.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        threads.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ablab
