#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace solon {

/// Run fn(0..count-1) on up to `threads` workers with a static stride
/// partition. Each index must touch disjoint state; results are then
/// identical to the serial loop. The lowest-index exception is rethrown.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int n_workers = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += n_workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace solon
