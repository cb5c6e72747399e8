#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tvls {

/// Worker count: TVLS_THREADS when set to a positive integer, else the hardware
/// concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("TVLS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, count) over contiguous blocks; the first exception
/// thrown by any worker is rethrown after all workers finish.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = count * w / workers;
      const std::size_t hi = count * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise summation, so the result does not depend on how a reduction is split.
template <typename It>
double pairwise_sum(It first, It last) {
  const auto n = std::distance(first, last);
  if (n <= 8) {
    double s = 0.0;
    for (; first != last; ++first) s += *first;
    return s;
  }
  It mid = first;
  std::advance(mid, n / 2);
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

}  // namespace tvls
