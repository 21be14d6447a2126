#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fbm::detail {

// Fixed set of workers that execute indexed tasks; the calling thread helps.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned threads);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned threads() const { return static_cast<unsigned>(workers_.size()) + 1; }

  // Runs fn(0) ... fn(tasks - 1) and blocks until all finished. The first
  // exception thrown by a task is rethrown here.
  void run(std::size_t tasks, const std::function<void(std::size_t)>& fn);

 private:
  void work_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_, done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t tasks_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

// Shared pool for a given thread count (created on first use).
ThreadPool& pool_for(unsigned threads);

// threads == 0 resolves to FBM_THREADS, then hardware concurrency.
unsigned resolve_threads(unsigned threads);

}  // namespace fbm::detail
