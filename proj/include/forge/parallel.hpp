#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace forge {

/// Worker count: FORGE_THREADS when set (>= 1), else the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("FORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Calls fn(w) for w in [0, workers) on separate threads; the first exception
/// thrown by any worker is rethrown on the caller's thread.
template <class Fn>
void run_workers(std::size_t workers, Fn&& fn) {
  if (workers <= 1) {
    fn(std::size_t{0});
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::size_t worker_count(std::size_t items) {
  return std::clamp<std::size_t>(items / 64, 1, static_cast<std::size_t>(thread_count()));
}

/// Runs body(i) for i in [0, count). Iterations must be independent.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = worker_count(count);
  run_workers(workers, [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += workers) body(i);
  });
}

/// Max of f(i) over [0, count), starting from 0; order-insensitive. Any NaN
/// makes the result NaN.
template <class F>
double parallel_max(std::size_t count, F&& f) {
  const std::size_t workers = worker_count(count);
  std::vector<double> partial(workers, 0.0);
  run_workers(workers, [&](std::size_t w) {
    double m = 0.0;
    for (std::size_t i = w; i < count; i += workers) {
      const double v = static_cast<double>(f(i));
      if (std::isnan(v)) {
        m = v;
        break;
      }
      m = std::max(m, v);
    }
    partial[w] = m;
  });
  double out = 0.0;
  for (double v : partial) {
    if (std::isnan(v)) return v;
    out = std::max(out, v);
  }
  return out;
}

}  // namespace forge
