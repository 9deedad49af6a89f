// SPDX-License-Identifier: Apache-2.0
// Deterministic per-trajectory random streams: SplitMix64-seeded
// xoshiro256++. Stream j depends only on (seed, j), never on worker layout.
#pragma once

#include <cstdint>

namespace qjs {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

class Xoshiro256pp {
 public:
  // Counter-based stream splitting: the j-th trajectory stream of a run.
  Xoshiro256pp(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm(seed ^ (0xD2B74407B1CE6E93ull * (stream + 1)));
    for (auto& si : s_) si = sm.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;  // avoid all-zero
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform double in [0, 1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace qjs
