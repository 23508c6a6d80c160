#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace uinfer {

// Runs body(i) for i = 0..count-1. threads <= 1 runs inline on the calling
// thread. Workers pull indices from a shared counter, so the assignment of
// index to thread is nondeterministic; callers must write results into
// per-index slots to stay order independent. The first exception wins and is
// rethrown on the calling thread after all workers join.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (count == 0) return;
  if (threads <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(count, std::memory_order_relaxed);  // drain remaining work
        return;
      }
    }
  };

  std::size_t n_workers = threads;
  if (n_workers > count) n_workers = count;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace uinfer
