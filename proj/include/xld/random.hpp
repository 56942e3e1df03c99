#pragma once

// Portable randomness. std::mt19937_64's output sequence is fixed by the
// standard; the distributions in <random> are not, so bounded draws and
// shuffles used for reproducible outputs are defined here.

#include <cstdint>
#include <random>
#include <span>

namespace xld {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection of the biased low range. n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

/// SplitMix64 finalizer, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Fisher-Yates over the first `count` positions: afterwards items[0..count)
/// is a uniform sample without replacement, in draw order.
template <typename T>
void partial_shuffle(std::span<T> items, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count && i + 1 < items.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, items.size() - i));
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace xld
