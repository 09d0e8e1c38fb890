#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace casl {

using Rng = std::mt19937_64;

// Splits one master seed into independent, documented streams. A stream is
// identified by a label ("rep", "data", "split", "init", "shuffle",
// "augment", "sample", "proxy") and an index (repetition, iteration). The
// split is a splitmix64 finalizer over
// an FNV-1a hash of (master, label, index), so streams never collide by
// accident and the schedule is stable across runs.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix_byte = [&h](std::uint64_t byte) {
    h ^= byte & 0xff;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix_byte(master >> (8 * i));
  for (char c : label) mix_byte(static_cast<std::uint64_t>(c));
  for (int i = 0; i < 8; ++i) mix_byte(index >> (8 * i));

  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

inline Rng make_rng(std::uint64_t master, std::string_view label,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

}  // namespace casl
