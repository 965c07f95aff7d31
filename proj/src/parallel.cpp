#include "netkernel/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace netkernel {

namespace {
std::atomic<int> g_threads{0};

int default_threads() {
    if (const char* env = std::getenv("NETKERNEL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}
}  // namespace

int num_threads() {
    int n = g_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        n = default_threads();
        g_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_num_threads(int n) { g_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

void parallel_blocks(std::size_t total, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (total + block_size - 1) / block_size;
    const int workers = std::min<std::size_t>(num_threads(), n_blocks);

    auto run_block = [&](std::size_t b) {
        const std::size_t lo = b * block_size;
        const std::size_t hi = std::min(total, lo + block_size);
        fn(b, lo, hi);
    };

    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
                if (b >= n_blocks) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(n_blocks, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t total, const std::function<void(std::size_t)>& fn) {
    parallel_blocks(total, 1, [&](std::size_t, std::size_t lo, std::size_t) { fn(lo); });
}

}  // namespace netkernel
