#pragma once

// Minimal worker pool over an index range.

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rvelab {

inline constexpr const char* kWorkersEnv = "RVELAB_WORKERS";

/// Worker count: the environment override if set and positive, else
/// `requested` if positive, else the hardware concurrency.
inline int resolve_workers(int requested) {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls body(i) for i in [0, count) on `workers` threads; indices are handed
/// out dynamically. The first exception thrown by a body is rethrown after all
/// workers stop.
template <typename F>
void parallel_for(std::size_t count, int workers, F&& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = static_cast<std::size_t>(workers) < count ? static_cast<std::size_t>(workers) : count;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rvelab
