#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace halfspace {

// Deterministic random source. mt19937_64 output is fully specified by the
// standard, and all mappings to doubles are done by hand here, so a given seed
// yields the same stream on every platform/compiler. (std::uniform_*_
// distribution and std::normal_distribution are implementation-defined and are
// deliberately not used.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform on {0, ..., n-1}, bias-free via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = bits();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller. No second-value caching: each call
  // consumes exactly two engine outputs, so the stream position is a pure
  // function of call counts.
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Independent child stream for chunked work: chunk i of a run seeded with s
  // always sees the same stream regardless of thread count. Derived from the
  // construction seed, not the current engine state.
  Rng fork(std::uint64_t stream) const {
    return Rng(splitmix(seed_ ^ (0x9e3779b97f4a7c15ull * (stream + 1))));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace halfspace
