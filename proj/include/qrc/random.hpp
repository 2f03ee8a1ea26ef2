#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qrc {

/// Purposes for independent random streams. One stream exists per
/// (experiment seed, ensemble member, purpose) triple.
enum class Stream : std::uint64_t {
  InitialCondition = 1,
  CircuitAngles = 2,
  Projection = 3,
  TangentBasis = 4,
  Shots = 5,
  ClvInit = 6,
  Test = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, Stream purpose, std::uint64_t member = 0) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(purpose));
  key = splitmix64(key ^ member);
  return Rng(key);
}

}  // namespace qrc
