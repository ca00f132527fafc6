// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fovtrace {

// Worker count for `requested` (0 = one per hardware thread).
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1, int(std::thread::hardware_concurrency()));
}

// Runs func(begin, end) over [0, count) in chunks of `grain`, pulling chunks
// from a shared counter. Results must not depend on which worker runs a chunk.
template <typename Func>
void parallel_for(size_t count, int workers, size_t grain, Func&& func) {
  if (count == 0) return;
  grain = std::max<size_t>(grain, 1);
  const size_t chunks = (count + grain - 1) / grain;
  const int nthreads = int(std::min<size_t>(size_t(resolve_workers(workers)), chunks));
  if (nthreads <= 1) {
    func(size_t(0), count);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const size_t chunk = next.fetch_add(1);
      if (chunk >= chunks) return;
      try {
        func(chunk * grain, std::min(count, (chunk + 1) * grain));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(size_t(nthreads - 1));
  for (int i = 1; i < nthreads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fovtrace
