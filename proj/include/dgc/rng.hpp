#pragma once

#include <cstdint>
#include <random>

namespace dgc {

using Rng = std::mt19937_64;

/// Named substreams of a master seed.
enum class Stream : std::uint64_t {
  realization = 1,
  field = 2,
  thinning = 3,
  folds = 4,
  dgc = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream (stream, index, sub) of `master`; independent of call order.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index,
                                 std::uint64_t sub = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  return splitmix64(h ^ sub);
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace dgc
