#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace decaylab {

/// Worker count used by parallel_map; 1 runs everything inline.
void set_thread_count(int threads);
int thread_count();

/// Evaluates fn(i) for i in [0, n). Results land at their own index, so the output does not
/// depend on scheduling. The exception from the lowest failing index is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, thread_count())), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        out[i] = fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace decaylab
