#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cigw {

/// Named sub-streams derived from one master seed. Every source of
/// randomness in a run draws from exactly one of these.
enum class Stream : std::uint64_t {
  kShuffle = 1,
  kInit = 2,
  kPolicy = 3,
  kEnvironment = 4,
  kOffline = 5,
  kBootstrap = 6,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

/// 64-bit Mersenne twister with a platform-independent unit-interval draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  Rng split() { return Rng(mix64(engine_())); }

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::below, so orderings do not depend on
/// the standard library's distribution implementation.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace cigw
