// Minimal bounded worker pool for independent index-addressed tasks.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ctmap {

// Runs fn(i) for every i in [0, count) on `workers` threads (0 = one per
// hardware thread). Tasks must be independent; the first exception thrown
// by any task is rethrown on the calling thread after all workers join.
inline void parallel_for_index(std::size_t count, int workers,
                               const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned int w = workers > 0 ? static_cast<unsigned int>(workers)
                               : std::thread::hardware_concurrency();
  if (w < 1) w = 1;
  if (w > count) w = static_cast<unsigned int>(count);
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned int t = 0; t < w; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ctmap
