#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace pplgec {

/// Uniform integer in [0, bound) by rejection sampling on raw mt19937_64
/// output. Unlike std::uniform_int_distribution the sequence is identical
/// across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

/// Fisher-Yates with uniform_below; reproducible for a fixed seed.
template <class T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace pplgec
