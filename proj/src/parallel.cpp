#include "polysart/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace polysart {
namespace {

std::atomic<unsigned> g_threads{0};

// hardware_concurrency() is a syscall on Linux; query it once.
unsigned hardware_threads() {
  static const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return hw;
}

}  // namespace

void set_thread_count(unsigned count) { g_threads.store(count); }

unsigned thread_count() {
  const unsigned requested = g_threads.load();
  return requested == 0 ? hardware_threads() : requested;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const std::size_t max_workers = std::max<std::size_t>(1, total / std::max<std::size_t>(1, min_chunk));
  const std::size_t workers = std::min<std::size_t>(thread_count(), max_workers);
  if (workers <= 1) {
    body(begin, end);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_chunk = [&](std::size_t w) {
    const std::size_t lo = begin + total * w / workers;
    const std::size_t hi = begin + total * (w + 1) / workers;
    try {
      body(lo, hi);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
    run_chunk(0);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace polysart
