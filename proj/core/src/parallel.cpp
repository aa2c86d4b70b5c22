#include "hartree/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hartree {

namespace {
std::atomic<int> g_override{0};
}

int thread_count() {
    if (int o = g_override.load(); o > 0) return o;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("HARTREE_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(cap, hw);
    }
    return hw;
}

void set_thread_count(int n) { g_override.store(std::max(0, n)); }

void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn) {
    const int nt = static_cast<int>(std::min<Eigen::Index>(thread_count(), n));
    if (nt <= 1) {
        for (Eigen::Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const Eigen::Index chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const Eigen::Index lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (Eigen::Index i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace hartree
