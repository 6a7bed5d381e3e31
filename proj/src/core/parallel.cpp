#include "ascnet/core/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace ascnet {

int thread_count() {
  static const int count = [] {
    if (const char* env = std::getenv("ASCNET_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return count;
}

namespace {

// Persistent pool; workers grab chunks of the current job. Chunk assignment
// is dynamic but indices never share state, so output bits do not depend on
// which thread ran which index.
class Pool {
public:
  Pool() {
    int workers = thread_count() - 1;
    for (int i = 0; i < workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~Pool() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    if (threads_.empty() || n == 1) {
      for (size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      job_fn_ = &fn;
      job_n_ = n;
      next_.store(0, std::memory_order_relaxed);
      pending_ = static_cast<int>(threads_.size());
      ++generation_;
    }
    cv_.notify_all();
    drain();
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    job_fn_ = nullptr;
  }

private:
  void drain() {
    size_t i;
    while ((i = next_.fetch_add(1, std::memory_order_relaxed)) < job_n_) {
      (*job_fn_)(i);
    }
  }

  void worker_loop() {
    uint64_t seen = 0;
    for (;;) {
      const std::function<void(size_t)>* fn = nullptr;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        fn = job_fn_;
      }
      size_t i;
      while ((i = next_.fetch_add(1, std::memory_order_relaxed)) < job_n_) {
        (*fn)(i);
      }
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(size_t)>* job_fn_ = nullptr;
  size_t job_n_ = 0;
  std::atomic<size_t> next_{0};
  int pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  static Pool pool;
  pool.run(n, fn);
}

}  // namespace ascnet
