#include "slm/parallel.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <utility>

namespace slm {

namespace {

thread_local bool t_inside_pool_task = false;

struct TaskScope {
  bool previous;
  TaskScope() : previous(t_inside_pool_task) { t_inside_pool_task = true; }
  ~TaskScope() { t_inside_pool_task = previous; }
};

std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t n, std::size_t chunks, std::size_t k) {
  return {n * k / chunks, n * (k + 1) / chunks};
}

std::mutex g_default_mutex;
std::unique_ptr<WorkerPool> g_default_pool;

}  // namespace

WorkerPool::WorkerPool(std::size_t workers) {
  workers = std::max<std::size_t>(workers, 1);
  errors_.resize(workers);
  threads_.reserve(workers - 1);
  for (std::size_t i = 1; i < workers; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run_chunk(std::size_t index) {
  auto [begin, end] = chunk_bounds(job_n_, size(), index);
  if (begin == end) return;
  TaskScope scope;
  try {
    (*job_)(begin, end);
  } catch (...) {
    errors_[index] = std::current_exception();
  }
}

void WorkerPool::worker_loop(std::size_t index) {
  std::size_t seen = 0;
  while (true) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    run_chunk(index);
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::unique_lock owner(owner_, std::try_to_lock);
  if (threads_.empty() || n == 1 || t_inside_pool_task || !owner.owns_lock()) {
    TaskScope scope;
    fn(0, n);
    return;
  }

  std::fill(errors_.begin(), errors_.end(), nullptr);
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    job_n_ = n;
    pending_ = threads_.size();
    ++generation_;
  }
  start_cv_.notify_all();
  run_chunk(0);
  {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    job_ = nullptr;
  }
  for (auto& e : errors_)
    if (e) std::rethrow_exception(e);
}

std::size_t physical_core_count() {
  namespace fs = std::filesystem;
  std::set<std::pair<std::string, std::string>> cores;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator("/sys/devices/system/cpu", ec)) {
    const auto name = entry.path().filename().string();
    if (!name.starts_with("cpu") || name.size() < 4 ||
        !std::all_of(name.begin() + 3, name.end(), [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    std::ifstream pkg(entry.path() / "topology" / "physical_package_id");
    std::ifstream core(entry.path() / "topology" / "core_id");
    std::string p, c;
    if (pkg >> p && core >> c) cores.emplace(p, c);
  }
  if (!cores.empty()) return cores.size();
  return std::max(1u, std::thread::hardware_concurrency());
}

WorkerPool& default_pool() {
  std::lock_guard lock(g_default_mutex);
  if (!g_default_pool) g_default_pool = std::make_unique<WorkerPool>(physical_core_count());
  return *g_default_pool;
}

void set_default_workers(std::size_t workers) {
  std::lock_guard lock(g_default_mutex);
  g_default_pool = std::make_unique<WorkerPool>(workers == 0 ? physical_core_count() : workers);
}

}  // namespace slm
