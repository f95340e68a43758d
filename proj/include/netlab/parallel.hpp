#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace netlab {

// Run fn(i) for i in [0, n).  Results are stored by index, so the outcome is
// identical for any job count; workers pull indices from a shared counter.
template <typename R>
std::vector<R> run_replicas(std::size_t n, int jobs, const std::function<R(std::size_t)>& fn) {
    std::vector<R> out(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::size_t next = 0;
    std::mutex mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (err || next >= n) return;
                i = next++;
            }
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace netlab
