#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stengrid {

/// Fixed pool of workers executing batches of indexed jobs. With one worker
/// everything runs inline on the caller. Jobs are distributed by an atomic
/// counter; every job writes disjoint output, so the assignment of jobs to
/// workers never affects results.
class WorkerPool {
 public:
  explicit WorkerPool(int workers = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int workers() const { return workerCount_; }

  /// Run fn(job, workerSlot) for job in [0, jobCount); blocks until all
  /// jobs finish. workerSlot is in [0, workers()); the caller runs as slot 0.
  void run(int jobCount, const std::function<void(int, int)>& fn);

 private:
  void worker_loop(int slot);
  void drain(const std::function<void(int, int)>& fn, int slot);

  int workerCount_ = 1;
  std::vector<std::thread> threads_;

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(int, int)>* job_ = nullptr;
  int jobCount_ = 0;
  std::atomic<int> nextJob_{0};
  int busyWorkers_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace stengrid
