#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace dhj {

/// Seeded 64-bit generator with platform-independent derived distributions.
///
/// std::mt19937_64's output sequence is fixed by the standard, but the
/// standard distributions are not, so bounded integers and shuffles are
/// derived here to keep every randomized output reproducible from the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

  /// Binomial(trials, 1/2) by summing fair bits.
  int binomial_half(int trials);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Uniformly random subset of {0, ..., universe-1} of the given size, sorted.
  std::vector<std::uint64_t> subset(std::uint64_t universe, std::uint64_t size);

  /// Uniformly random permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a master seed and a label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

}  // namespace dhj
