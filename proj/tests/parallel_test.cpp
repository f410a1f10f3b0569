#include "halfspace/parallel.hpp"

#include <cstdint>
#include <doctest.h>
#include <numeric>
#include <vector>

#include "halfspace/rng.hpp"

using halfspace::parallel_reduce;

TEST_CASE("chunks partition the index range exactly") {
  for (std::uint64_t n : {0ull, 1ull, 7ull, 255ull, 256ull, 1000ull, 123457ull}) {
    std::vector<std::uint64_t> seen;
    auto total = parallel_reduce<std::uint64_t>(
        n, 0,
        [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) { return hi - lo; },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    CHECK(total == n);
  }
}

TEST_CASE("reduction order is fixed, so floating sums are bit-identical") {
  const std::uint64_t n = 100000;
  auto run = [&] {
    return parallel_reduce<double>(
        n, 0.0,
        [](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
          halfspace::Rng rng = halfspace::Rng(911).fork(chunk);
          double s = 0;
          for (std::uint64_t i = lo; i < hi; ++i) s += rng.gaussian();
          return s;
        },
        [](double a, double b) { return a + b; });
  };
  const double first = run();
  for (int rep = 0; rep < 3; ++rep) CHECK(run() == first);
}

TEST_CASE("per-chunk streams do not depend on the worker count") {
  // Chunk boundaries are a function of n alone; verify against the formula.
  const std::uint64_t n = 12345;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges(halfspace::kParallelChunks);
  parallel_reduce<int>(
      n, 0,
      [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
        ranges[c] = {lo, hi};
        return 0;
      },
      [](int a, int b) { return a + b; });
  std::uint64_t prev = 0;
  for (std::uint64_t c = 0; c < halfspace::kParallelChunks; ++c) {
    CHECK(ranges[c].first == prev);
    CHECK(ranges[c].second >= ranges[c].first);
    prev = ranges[c].second;
  }
  CHECK(prev == n);
}
