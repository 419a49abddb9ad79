#ifndef WSETLAB_PARALLEL_HPP
#define WSETLAB_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wsetlab {
namespace par {

/// Worker cap: WSETLAB_THREADS when set, hardware concurrency otherwise.
inline int max_threads() {
  if (const char* env = std::getenv("WSETLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..n-1) across up to `threads` workers. Tasks must write only
/// to their own result slots; results are then independent of scheduling.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = max_threads();
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, n] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace par
}  // namespace wsetlab

#endif
