#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace windfield {

/// Seed-stream derivation. Every randomized stage draws from its own
/// mt19937_64 whose seed is derived from (master seed, purpose tag, indices).
/// Streams for distinct tags or indices are statistically independent, and a
/// given (seed, tag, indices) tuple always yields the same stream, so reruns
/// and parallel schedules reproduce byte-identical results.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return splitmix64(splitmix64(master) ^ hash_tag(tag));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a) {
  return splitmix64(derive_seed(master, tag) ^ splitmix64(a));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a, std::uint64_t b) {
  return splitmix64(derive_seed(master, tag, a) ^ splitmix64(splitmix64(b)));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace windfield
