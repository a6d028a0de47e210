#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace bellsim {

/// 0 means "use hardware concurrency" (at least 1).
inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Calls fn(i) for every i in [0, n), split into contiguous chunks across
/// threads. fn must be safe to call concurrently for distinct indices and
/// must not throw; results must not depend on which thread runs which index.
template <typename Fn>
void parallel_for_index(std::size_t n, unsigned n_threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(resolve_thread_count(n_threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t first = w * chunk;
    const std::size_t last = std::min(n, first + chunk);
    if (first >= last) {
      break;
    }
    pool.emplace_back([first, last, &fn] {
      for (std::size_t i = first; i < last; ++i) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

}  // namespace bellsim
