#ifndef CCSIM_RNG_HPP
#define CCSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace ccsim {

// splitmix64; used to derive independent seeds for per-core / per-purpose
// std::mt19937_64 streams so that runs are reproducible across platforms.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t stream, uint64_t purpose = 0) {
  return std::mt19937_64(mix64(mix64(seed + 0x1234) ^ mix64(stream * 0x9e37 + purpose)));
}

}  // namespace ccsim

#endif
