#include "stengrid/worker_pool.hpp"

#include <atomic>
#include <stdexcept>

namespace stengrid {

WorkerPool::WorkerPool(int workers) : workerCount_(workers) {
  if (workers < 1) throw std::invalid_argument("WorkerPool: workers must be >= 1");
  threads_.reserve(static_cast<std::size_t>(workers - 1));
  for (int s = 1; s < workers; ++s) {
    threads_.emplace_back([this, s] { worker_loop(s); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::drain(const std::function<void(int, int)>& fn, int slot) {
  for (;;) {
    const int job = nextJob_.fetch_add(1, std::memory_order_relaxed);
    if (job >= jobCount_) break;
    fn(job, slot);
  }
}

void WorkerPool::worker_loop(int slot) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(int, int)>* fn = nullptr;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      if (job_ == nullptr) continue;  // batch already fully retired
      fn = job_;
      ++busyWorkers_;  // counts workers actively draining this batch
    }
    drain(*fn, slot);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --busyWorkers_;
    }
    done_.notify_one();
  }
}

void WorkerPool::run(int jobCount, const std::function<void(int, int)>& fn) {
  if (jobCount <= 0) return;
  if (workerCount_ == 1 || jobCount == 1) {
    for (int j = 0; j < jobCount; ++j) fn(j, 0);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    job_ = &fn;
    jobCount_ = jobCount;
    nextJob_.store(0, std::memory_order_relaxed);
    ++generation_;
  }
  wake_.notify_all();
  drain(fn, 0);
  std::unique_lock<std::mutex> lock(mutex_);
  done_.wait(lock, [&] {
    return busyWorkers_ == 0 && nextJob_.load(std::memory_order_relaxed) >= jobCount_;
  });
  job_ = nullptr;  // late wakers must not touch the caller's function
}

}  // namespace stengrid
