#pragma once

// Splittable 64-bit generator. Every random quantity in the library is drawn
// from a stream whose seed is a pure function of (root seed, tag, call, sample),
// so work can be dispatched to any number of threads without changing results.

#include <cmath>
#include <cstdint>

namespace ssdm {

/// Stream tags; distinct tags never share substreams.
enum class StreamTag : std::uint64_t {
  Solve = 0x536f6c7665ull,
  Validate = 0x56616c6964ull,
  Estimate = 0x457374696dull,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed of substream (tag, call, sample) under root seed.
constexpr std::uint64_t derive_seed(std::uint64_t root, StreamTag tag, std::uint64_t call,
                                    std::uint64_t sample) noexcept {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  h = splitmix64(h ^ call);
  return splitmix64(h ^ (sample * 0xd6e8feb86659fd93ull));
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept {
    if (lo == hi) return lo;
    return lo + (hi - lo) * uniform01();
  }

 private:
  std::uint64_t state_;
};

}  // namespace ssdm
