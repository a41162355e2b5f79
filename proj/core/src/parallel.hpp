#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace qnpg::detail {

inline int resolve_workers(int requested, int n_items) {
  int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(workers, 1, std::max(1, n_items));
}

// Runs fn(i) for i in [0, n). Item i always goes to worker i % workers, and
// callers write results into slot i, so the outcome does not depend on
// scheduling. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(int n, int requested_workers, Fn&& fn) {
  const int workers = resolve_workers(requested_workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (int i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qnpg::detail
