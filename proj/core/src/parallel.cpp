#include "canopy/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace canopy {

namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("CANOPY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t> g_workers{0};
thread_local bool t_inside = false;

}  // namespace

std::size_t worker_count() {
  std::size_t n = g_workers.load();
  if (n == 0) {
    n = default_workers();
    g_workers = n;
  }
  return n;
}

void set_worker_count(std::size_t n) { g_workers = std::max<std::size_t>(1, n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = t_inside ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};
  // Nested calls run inline on the calling worker.
  // Small blocks keep load balanced; results are slot-addressed so the
  // scheduling order is irrelevant to output.
  const std::size_t block = std::max<std::size_t>(1, n / (workers * 8));
  auto run = [&] {
    t_inside = true;
    struct Reset {
      ~Reset() { t_inside = false; }
    } reset;
    for (;;) {
      const std::size_t start = next.fetch_add(block);
      if (start >= n) return;
      const std::size_t stop = std::min(n, start + block);
      for (std::size_t i = start; i < stop; ++i) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace canopy
