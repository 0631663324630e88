#pragma once

#include <cstddef>
#include <functional>

namespace polysart {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// default (hardware concurrency).
void set_thread_count(unsigned count);
unsigned thread_count();

/// Splits [begin, end) into contiguous chunks and runs `body(chunk_begin,
/// chunk_end)` on up to thread_count() threads. Each index is visited exactly
/// once. The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace polysart
