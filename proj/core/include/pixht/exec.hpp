#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pixht {

// Parallelism handle passed to data-parallel operations. Work is split into
// contiguous index ranges, so every output slot is written by exactly one
// thread and results never depend on the thread count.
struct Exec {
  unsigned threads = 1;

  // Reads PIXHT_THREADS; falls back to 1.
  static Exec from_env() {
    Exec e;
    if (const char* v = std::getenv("PIXHT_THREADS")) {
      try {
        const int n = std::stoi(v);
        if (n > 0) e.threads = static_cast<unsigned>(n);
      } catch (...) {
      }
    }
    return e;
  }

  static Exec hardware() {
    return Exec{std::max(1u, std::thread::hardware_concurrency())};
  }
};

// Calls fn(i) for i in [begin, end).
template <class Fn>
void parallel_for(const Exec& exec, long begin, long end, Fn&& fn) {
  const long n = end - begin;
  if (n <= 0) return;
  const long workers = std::min<long>(std::max(1u, exec.threads), n);
  if (workers == 1) {
    for (long i = begin; i < end; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const long chunk = (n + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    const long lo = begin + w * chunk;
    const long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pixht
