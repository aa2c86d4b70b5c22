#pragma once

#include <Eigen/Core>

#include <functional>

namespace hartree {

// Worker count: hardware concurrency, capped by HARTREE_LAB_THREADS when set (>= 1).
// set_thread_count(n > 0) overrides both; 0 restores the default.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n) over contiguous blocks; each index is visited once.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn);

} // namespace hartree
