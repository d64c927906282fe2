#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace fairshift {

using Rng = std::mt19937_64;

// splitmix64 finalizer: bijective avalanche over 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and up to three
// small indices. Indices are packed into one word (run: 22 bits, i and j:
// 21 bits each) before being avalanched together with the master seed.
constexpr std::uint64_t mix64(std::uint64_t master, std::uint64_t run,
                              std::uint64_t i, std::uint64_t j) noexcept {
  constexpr std::uint64_t kMask21 = (1ULL << 21) - 1;
  constexpr std::uint64_t kMask22 = (1ULL << 22) - 1;
  const std::uint64_t packed =
      ((run & kMask22) << 42) | ((i & kMask21) << 21) | (j & kMask21);
  return splitmix64(master ^ splitmix64(packed));
}

// Uniformly chooses `k` of `n` indices without replacement and returns them
// sorted ascending (partial Fisher-Yates).
inline std::vector<std::size_t> choose_without_replacement(std::size_t n,
                                                           std::size_t k,
                                                           Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t t = 0; t < k; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, n - 1);
    std::swap(pool[t], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// round() with halves away from zero; used for every exact-count rule.
inline std::size_t exact_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace fairshift
