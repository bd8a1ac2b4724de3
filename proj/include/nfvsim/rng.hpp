#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nfvsim {

// splitmix64 finalizer, used to derive stream seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// One root seed fans out to named per-module streams so a module can be
// swapped without perturbing the draws of the others.
inline std::mt19937_64 make_stream(std::uint64_t root_seed, std::string_view name,
                                   std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(root_seed ^ fnv1a(name));
  s = splitmix64(s ^ splitmix64(index + 0x51ed270b72f0c9ffULL));
  return std::mt19937_64(s);
}

}  // namespace nfvsim
