#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tsawf {

/// Runs body(i) for i in [0, n) on up to `jobs` threads with a static block
/// partition. Each index is visited exactly once; callers write results into
/// pre-sized slots so output never depends on scheduling. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, std::size_t jobs, Body&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (std::size_t w = 0; w < jobs; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tsawf
