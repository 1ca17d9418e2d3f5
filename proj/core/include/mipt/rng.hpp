#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mipt {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a word sequence, used to derive independent streams.
inline std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

inline std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

/// Stream purposes, so that pilot and production runs never share draws.
enum class StreamKind : std::uint64_t { production = 1, pilot = 2, bootstrap = 3, test = 4 };

/// Seed of the stream owned by one realization of one parameter cell.
inline std::uint64_t realization_seed(std::uint64_t master_seed, double alpha, double p, std::uint64_t L,
                                      std::uint64_t scheme_tag, StreamKind kind, std::uint64_t zeta) {
  return hash_words({master_seed, double_bits(alpha), double_bits(p), L, scheme_tag,
                     static_cast<std::uint64_t>(kind), zeta});
}

}  // namespace mipt
