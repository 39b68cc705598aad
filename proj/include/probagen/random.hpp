#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace probagen {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a path of indices,
/// e.g. derive_seed(seed, {kTraceStream, trace_index}).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

/// Seeded random source. Draws are defined bit-for-bit by the 64-bit Mersenne
/// Twister output, independent of the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1); safe for quantile functions.
  double uniform_open01() {
    double u = 0.0;
    do u = uniform01();
    while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const auto r = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return r < n ? r : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace probagen
