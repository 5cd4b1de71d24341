#pragma once

// Index-ordered parallel map. Results land in slot i no matter which worker
// produced them, so reductions over the output are thread-count independent.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace mppstat::parallel {

/// Worker cap used when a call passes threads = 0. Initialised from
/// MPPSTAT_THREADS, falling back to the hardware concurrency.
unsigned default_threads();
void set_default_threads(unsigned n);

template <class Fn>
auto map_indexed(std::size_t n, Fn&& fn, unsigned threads = 0) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    auto collect = [&] {
        std::vector<R> out;
        out.reserve(n);
        for (auto& s : slots) out.push_back(std::move(*s));
        return out;
    };
    unsigned workers = threads == 0 ? default_threads() : threads;
    if (workers > n) workers = static_cast<unsigned>(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
        return collect();
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return collect();
}

} // namespace mppstat::parallel
