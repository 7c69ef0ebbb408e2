#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace prmforge {

/// Run fn(i) for i in [0, count) on up to `max_parallel` threads. Results are
/// index-addressed so output order never depends on scheduling. The first
/// exception wins and is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, int max_parallel, Fn&& fn) {
  if (count == 0) return;
  int workers = std::max(1, std::min<int>(max_parallel, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          next.store(count);  // stop handing out work
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace prmforge
