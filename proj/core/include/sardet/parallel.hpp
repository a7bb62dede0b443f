// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace sardet {

/// Process-wide worker pool. Work is split into chunks that own disjoint
/// output ranges, so results are bit-identical for any thread count.
class ThreadPool {
public:
  static ThreadPool& instance();

  /// Number of threads used for parallel regions (including the caller).
  void set_threads(int n);
  int threads() const { return n_threads_; }

  /// Runs fn(chunk) for chunk in [0, n_chunks). Blocks until done.
  void run_chunks(int n_chunks, const std::function<void(int)>& fn);

  ~ThreadPool();

private:
  ThreadPool();
  void spawn(int workers);
  void join_all();

  struct Impl;
  Impl* impl_;
  int n_threads_ = 1;
};

/// Splits [0, n) into at most pool-thread chunks of at least `grain`
/// items and runs body(begin, end) on each.
void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace sardet
