#include "newton_chaos/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace newton_chaos {

namespace {

std::atomic<unsigned> g_limit{0};

unsigned default_limit() {
    if (const char* env = std::getenv("NEWTON_CHAOS_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_thread_limit(unsigned n) { g_limit.store(n); }

unsigned thread_limit() {
    unsigned n = g_limit.load();
    return n == 0 ? default_limit() : n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t min_chunk) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(thread_limit(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace newton_chaos
