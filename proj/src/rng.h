// Copyright 2026 The biasd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random number utilities with a pinned, platform-independent output stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard distributions are not used because their algorithms are
// implementation-defined; bounded integers and unit doubles are derived here
// explicitly. Independent substreams are obtained by mixing a root seed with
// stream coordinates through SplitMix64.

#ifndef BIASD_RNG_H_
#define BIASD_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace biasd {

inline constexpr const char* kRngAlgorithm =
    "mt19937_64 (splitmix64 substream mixing, 53-bit unit doubles, "
    "rejection-sampled bounded integers)";

// One SplitMix64 output step applied to `x`.
constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives a substream seed from a root seed and a path of coordinates, e.g.
// DeriveSeed(root, {iteration, user}).
inline uint64_t DeriveSeed(uint64_t root, std::initializer_list<uint64_t> path) {
  uint64_t h = SplitMix64(root);
  for (uint64_t coord : path) h = SplitMix64(h ^ SplitMix64(coord + 1));
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double UnitDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). `bound` must be positive.
  uint64_t Below(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool Bernoulli(double p) { return UnitDouble() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace biasd

#endif  // BIASD_RNG_H_
