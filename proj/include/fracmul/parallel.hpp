#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace fracmul {

/// Evaluates fn(0), ..., fn(count - 1) on up to `workers` threads and returns
/// the results in index order, so the output never depends on scheduling.
/// The exception of the lowest failing index is rethrown.
template <class F>
auto parallel_map(std::size_t count, std::size_t workers, F&& fn) {
    using T = decltype(fn(std::size_t{0}));
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Worker count used when none is configured.
inline std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace fracmul
