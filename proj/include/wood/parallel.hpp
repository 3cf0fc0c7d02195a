#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace wood {

// Runs fn(begin, end) over contiguous chunks of [0, n). Each chunk writes to
// disjoint output, so results are identical for any worker count.
template <typename Fn>
void parallel_chunks(size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  size_t w = workers < 1 ? 1 : static_cast<size_t>(workers);
  if (w > n) w = n;
  if (w == 1) {
    fn(size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(w);
  size_t chunk = (n + w - 1) / w;
  for (size_t t = 0; t < w; ++t) {
    size_t begin = t * chunk;
    size_t end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : threads) th.join();
}

inline int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace wood
