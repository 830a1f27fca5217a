// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rmtlab {

/// 0 -> hardware concurrency (at least 1).
int resolve_workers(int requested);

/// Runs f(trial) for trial in [0, count) on `workers` threads. Trials are
/// dealt round-robin; callers write into per-trial slots, so results never
/// depend on the worker count. The first exception thrown is rethrown.
template <class F>
void for_each_trial(std::size_t count, int workers, F&& f) {
  const std::size_t w = static_cast<std::size_t>(resolve_workers(workers));
  if (w <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t used = w < count ? w : count;
  pool.reserve(used);
  for (std::size_t id = 0; id < used; ++id) {
    pool.emplace_back([&, id] {
      try {
        for (std::size_t k = id; k < count; k += used) f(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rmtlab
