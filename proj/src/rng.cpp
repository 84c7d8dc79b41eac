#include "dhj/rng.hpp"

#include <algorithm>
#include <numeric>

namespace dhj {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int Rng::binomial_half(int trials) {
  int total = 0;
  while (trials >= 64) {
    total += __builtin_popcountll(next());
    trials -= 64;
  }
  if (trials > 0) total += __builtin_popcountll(next() >> (64 - trials));
  return total;
}

std::vector<std::uint64_t> Rng::subset(std::uint64_t universe, std::uint64_t size) {
  // Floyd's algorithm.
  std::vector<std::uint64_t> chosen;
  chosen.reserve(size);
  for (std::uint64_t j = universe - size; j < universe; ++j) {
    std::uint64_t t = below(j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
      chosen.push_back(t);
    else
      chosen.push_back(j);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(std::span<int>(perm));
  return perm;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  // FNV-1a over the label, mixed into the master seed with splitmix64.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace dhj
