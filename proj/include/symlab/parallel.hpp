#pragma once
// Deterministic chunked parallel loops: work is split into a fixed number of
// chunks independent of the worker count, and results are merged in chunk order.

#include <functional>
#include <thread>
#include <vector>

#include "symlab/common.hpp"

namespace symlab {

inline void parallel_chunks(int nchunks, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), nchunks);
  if (workers <= 1) {
    for (int c = 0; c < nchunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (int c = t; c < nchunks; c += workers) body(c);
    });
  for (auto& th : pool) th.join();
}

}  // namespace symlab
