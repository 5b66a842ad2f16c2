#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace vrpgp {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results must be
// written by index; scheduling order never matters. If any call throws, the
// exception of the lowest failing index is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn &&fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto body = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(std::min(threads, count));
    for (std::size_t t = 0; t < std::min(threads, count); ++t) {
        pool.emplace_back(body);
    }
    pool.clear();
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace vrpgp
