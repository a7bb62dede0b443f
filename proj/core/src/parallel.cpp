// SPDX-License-Identifier: Apache-2.0
#include "sardet/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace sardet {

struct ThreadPool::Impl {
  std::mutex mu;
  std::condition_variable cv_work;
  std::condition_variable cv_done;
  std::vector<std::thread> workers;
  const std::function<void(int)>* job = nullptr;
  std::atomic<int> next_chunk{0};
  int n_chunks = 0;
  int active = 0;
  std::uint64_t generation = 0;
  bool stop = false;

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn = nullptr;
      {
        std::unique_lock<std::mutex> lk(mu);
        cv_work.wait(lk, [&] { return stop || generation != seen; });
        if (stop) return;
        seen = generation;
        fn = job;
      }
      for (;;) {
        int c = next_chunk.fetch_add(1);
        if (c >= n_chunks) break;
        (*fn)(c);
      }
      {
        std::lock_guard<std::mutex> lk(mu);
        if (--active == 0) cv_done.notify_all();
      }
    }
  }
};

ThreadPool::ThreadPool() : impl_(new Impl) {}

ThreadPool::~ThreadPool() {
  join_all();
  delete impl_;
}

ThreadPool& ThreadPool::instance() {
  static ThreadPool pool;
  return pool;
}

void ThreadPool::join_all() {
  {
    std::lock_guard<std::mutex> lk(impl_->mu);
    impl_->stop = true;
  }
  impl_->cv_work.notify_all();
  for (auto& t : impl_->workers) t.join();
  impl_->workers.clear();
  impl_->stop = false;
}

void ThreadPool::spawn(int workers) {
  for (int i = 0; i < workers; ++i)
    impl_->workers.emplace_back([this] { impl_->worker_loop(); });
}

void ThreadPool::set_threads(int n) {
  if (n < 1) n = 1;
  if (n == n_threads_) return;
  join_all();
  n_threads_ = n;
  spawn(n - 1);  // caller participates
}

void ThreadPool::run_chunks(int n_chunks, const std::function<void(int)>& fn) {
  if (n_chunks <= 0) return;
  if (n_threads_ == 1 || n_chunks == 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(impl_->mu);
    impl_->job = &fn;
    impl_->n_chunks = n_chunks;
    impl_->next_chunk.store(0);
    impl_->active = static_cast<int>(impl_->workers.size());
    ++impl_->generation;
  }
  impl_->cv_work.notify_all();
  // Caller works too.
  for (;;) {
    int c = impl_->next_chunk.fetch_add(1);
    if (c >= impl_->n_chunks) break;
    fn(c);
  }
  std::unique_lock<std::mutex> lk(impl_->mu);
  impl_->cv_done.wait(lk, [&] { return impl_->active == 0; });
}

void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (n <= 0) return;
  auto& pool = ThreadPool::instance();
  std::int64_t max_chunks = (n + grain - 1) / grain;
  int n_chunks = static_cast<int>(std::min<std::int64_t>(pool.threads(), max_chunks));
  if (n_chunks <= 1) {
    body(0, n);
    return;
  }
  pool.run_chunks(n_chunks, [&](int c) {
    std::int64_t begin = n * c / n_chunks;
    std::int64_t end = n * (c + 1) / n_chunks;
    if (begin < end) body(begin, end);
  });
}

}  // namespace sardet
