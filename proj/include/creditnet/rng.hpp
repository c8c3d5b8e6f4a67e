#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace creditnet {

// splitmix64. Chosen over std::mt19937 + std::*_distribution because the
// standard distributions are implementation-defined: pinned seeds must pin
// the produced networks, shuffles and subsets across toolchains.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  bool next_bool() { return (next() & 1ull) != 0; }

  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  // Fisher-Yates; the draw sequence is part of the pinned contract.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// FNV-1a over the tag, mixed into the base seed. Used to split one master
// seed into independent streams (per instance, per stage).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  SplitMix64 mix(base ^ h);
  return mix.next();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 mix(base ^ (0x9e3779b97f4a7c15ull + index));
  return mix.next();
}

}  // namespace creditnet
