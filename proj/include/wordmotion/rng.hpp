#pragma once

// Named child random streams. Every random decision derives from one root
// seed plus a stable name, so adding a consumer never perturbs the others.

#include <cstdint>
#include <random>
#include <string_view>

#include "wordmotion/detail/text.hpp"

namespace wordmotion {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ detail::fnv1a(name));
}

using Rng = std::mt19937_64;

inline Rng child_stream(std::uint64_t seed, std::string_view name) {
  return Rng(child_seed(seed, name));
}

}  // namespace wordmotion
