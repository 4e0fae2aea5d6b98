#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace caflow {

// Runs fn(i) for i in [begin, end) on up to `jobs` threads (jobs <= 0:
// hardware concurrency). Contiguous static chunks, no shared state, so
// results written to disjoint slots are identical for any jobs value.
template <typename Fn>
void parallel_for(int begin, int end, int jobs, Fn&& fn) {
  const int n = end - begin;
  if (n <= 0) return;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, n);
  if (jobs == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  const int chunk = (n + jobs - 1) / jobs;
  for (int t = 0; t < jobs; ++t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace caflow
