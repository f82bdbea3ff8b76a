#pragma once

// Fixed-chunk work splitting. Chunk boundaries depend only on the problem
// size, never on the worker count, so any reduction performed chunk by chunk
// in chunk order is bit-identical for every `jobs` setting.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace ccep {

inline constexpr Eigen::Index kUnitChunk = 512;

struct ChunkRange {
  Eigen::Index index;
  Eigen::Index begin;
  Eigen::Index end;
  Eigen::Index size() const noexcept { return end - begin; }
};

inline Eigen::Index chunk_count(Eigen::Index n, Eigen::Index chunk = kUnitChunk) {
  return (n + chunk - 1) / chunk;
}

/// Calls fn(ChunkRange) for every chunk of [0, n), on up to `jobs` threads.
/// The first exception thrown by any chunk is rethrown on the caller.
template <typename Fn>
void for_each_chunk(Eigen::Index n, int jobs, Fn&& fn, Eigen::Index chunk = kUnitChunk) {
  const Eigen::Index chunks = chunk_count(n, chunk);
  auto range = [&](Eigen::Index c) {
    return ChunkRange{c, c * chunk, std::min(n, (c + 1) * chunk)};
  };
  const int workers = static_cast<int>(std::min<Eigen::Index>(std::max(jobs, 1), chunks));
  if (workers <= 1) {
    for (Eigen::Index c = 0; c < chunks; ++c) fn(range(c));
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (Eigen::Index c = next++; c < chunks; c = next++) {
          try {
            fn(range(c));
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ccep
