#include "nonloc/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace nonloc {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) {
    g_threads.store(n < 1 ? 1 : n);
}

int threads() {
    return g_threads.load();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nt = threads();
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(nt), n);
    const std::size_t chunk = (n + workers - 1) / workers;

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::atomic<bool> has_error{false};

    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                // keep the first exception; rows are independent so partial
                // results are simply discarded by the caller's error path
                bool expected = false;
                if (has_error.compare_exchange_strong(expected, true))
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (has_error.load()) std::rethrow_exception(first_error);
}

} // namespace nonloc
