#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rwrs {

/// Replicates are grouped into fixed-size blocks; block boundaries never
/// depend on the worker count, which keeps reductions reproducible.
inline constexpr std::size_t kReplicateBlock = 1024;

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(block, worker) for every block in [0, n_blocks) on a bounded
/// pool. Blocks are claimed dynamically; callers store results by block index.
template <class Body>
void for_each_block(std::size_t n_blocks, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n_blocks, 1)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) body(b, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t b = next++; b < n_blocks; b = next++) body(b, w);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_blocks;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Number of kReplicateBlock blocks covering `reps` replicates.
inline std::size_t block_count(std::size_t reps, std::size_t block = kReplicateBlock) {
  return (reps + block - 1) / block;
}

}  // namespace rwrs
