#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace igl::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed of `parent` for a named stream and a list of integer keys.
/// Independent of the order in which children are requested.
inline std::uint64_t derive(std::uint64_t parent, std::string_view stream,
                            std::initializer_list<std::uint64_t> keys = {}) noexcept {
  std::uint64_t h = splitmix64(parent ^ fnv1a(stream));
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace igl::rng
