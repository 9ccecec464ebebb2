#pragma once

#include <cstdint>
#include <string_view>

namespace gridbreeder {

namespace detail {

inline std::uint64_t splitmix64_fin(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace detail

/// Counter-based SplitMix64 stream. Output i is the SplitMix64 finalizer
/// applied to key + (i+1) * golden ratio, so streams with distinct keys are
/// independent and a stream can be replayed from (key, counter) alone.
/// Bit-reproducible across platforms; Monte Carlo repetitions derive
/// disjoint keys via derive().
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Key for a (seed, tag, a, b) cell of a sweep, e.g. tag = variant name,
  /// a = rounds, b = repetition index.
  static CounterRng derive(std::uint64_t seed, std::string_view tag,
                           std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = detail::splitmix64_fin(seed);
    k = detail::splitmix64_fin(k ^ detail::fnv1a(tag));
    k = detail::splitmix64_fin(k ^ a);
    k = detail::splitmix64_fin(k ^ b);
    return CounterRng(k);
  }

  std::uint64_t next_u64() {
    return detail::splitmix64_fin(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gridbreeder
