#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace halfspace {

// Worker count: hardware concurrency, optionally capped by the
// HALFSPACE_PTAS_THREADS environment variable. Never affects results, only
// wall time (see parallel_reduce).
inline int thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("HALFSPACE_PTAS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return static_cast<int>(n);
}

// Work is always split into this fixed number of chunks, independent of the
// worker count, so per-chunk random streams and the reduction order are stable.
inline constexpr std::uint64_t kParallelChunks = 256;

// Deterministic map-reduce over [0, n): chunk_fn(chunk_index, begin, end) -> T
// runs on an arbitrary thread, but the chunk boundaries are fixed and the
// results are combined strictly in chunk order, so the output is a pure
// function of n and chunk_fn.
template <class T, class ChunkFn, class ReduceFn>
T parallel_reduce(std::uint64_t n, T init, ChunkFn&& chunk_fn, ReduceFn&& reduce) {
  const std::uint64_t chunks = std::min<std::uint64_t>(kParallelChunks, std::max<std::uint64_t>(n, 1));
  std::vector<T> results(chunks, init);
  const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));

  auto chunk_range = [&](std::uint64_t c) {
    const std::uint64_t lo = n * c / chunks;
    const std::uint64_t hi = n * (c + 1) / chunks;
    return std::pair<std::uint64_t, std::uint64_t>{lo, hi};
  };

  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      auto [lo, hi] = chunk_range(c);
      results[c] = chunk_fn(c, lo, hi);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
        auto [lo, hi] = chunk_range(c);
        results[c] = chunk_fn(c, lo, hi);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  T acc = init;
  for (std::uint64_t c = 0; c < chunks; ++c) acc = reduce(acc, results[c]);
  return acc;
}

}  // namespace halfspace
