#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace slm {

// Fixed-size pool that runs a range [0, n) split into `size()` contiguous,
// evenly sized chunks. The calling thread executes chunk 0. Chunk boundaries
// depend only on (n, size()), and callers write results into pre-assigned
// slots, so output never depends on scheduling.
//
// A parallel_for issued from inside a pool task, or while another caller owns
// the pool, runs inline on the calling thread.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  // fn(begin, end) for each chunk. Rethrows the exception of the lowest
  // failing chunk after every chunk has finished.
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

 private:
  void worker_loop(std::size_t index);
  void run_chunk(std::size_t index);

  std::vector<std::thread> threads_;
  std::mutex owner_;  // held by the thread currently driving a parallel_for

  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;

  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0;
  std::vector<std::exception_ptr> errors_;
};

// Distinct (package, core) pairs from sysfs; falls back to
// std::thread::hardware_concurrency().
std::size_t physical_core_count();

// Process-wide pool used when no explicit pool is passed. Sized to the
// physical core count until set_default_workers is called. Resizing must not
// race with running work.
WorkerPool& default_pool();
void set_default_workers(std::size_t workers);

}  // namespace slm
