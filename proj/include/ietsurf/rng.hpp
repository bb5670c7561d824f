#pragma once

// Counter-based RNG.  Each draw is a pure function of (seed, stream, index),
// so parallel samplers produce the same values regardless of how work is
// split across threads.

#include <cstdint>

namespace ietsurf {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct CounterRng {
  uint64_t key;

  CounterRng(uint64_t seed, uint64_t stream)
      : key(splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL))) {}

  uint64_t bits(uint64_t index) const { return splitmix64(key ^ index); }

  // Uniform in [0,1).
  double uniform(uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo,hi).
  double uniform(uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index);
  }
};

}  // namespace ietsurf
