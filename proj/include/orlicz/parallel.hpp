#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace orlicz::parallel {

// 0 means one worker per hardware thread.
inline std::size_t& thread_limit() {
  static std::size_t n = 0;
  return n;
}

inline void set_thread_limit(std::size_t n) { thread_limit() = n; }

inline std::size_t workers_for(std::size_t jobs) {
  std::size_t t = thread_limit();
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::min(t, jobs);
}

/// Calls f(i) for i in [0, n) on a small pool. The first exception is rethrown.
template <class F>
void for_each_index(std::size_t n, F&& f) {
  const std::size_t t = workers_for(n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex guard;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < t; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace orlicz::parallel
