#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace renyi_fs {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream keyed by a tuple, e.g. (seed, step, permutation). Streams
// depend only on the key, never on evaluation order.
inline Rng keyed_rng(std::initializer_list<std::uint64_t> key) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t k : key) h = splitmix64(h ^ splitmix64(k));
  return Rng(h);
}

// Uniform integer in [0, bound) by rejection; independent of the standard
// library's distribution implementation.
inline std::uint64_t uniform_index(Rng &rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - Rng::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

inline std::vector<std::size_t> random_permutation(Rng &rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace renyi_fs
