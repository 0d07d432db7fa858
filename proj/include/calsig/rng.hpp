// Copyright 2026 The calsig authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace calsig {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: every (seed, sample index, slot) triple maps to one
// uniform draw, so shards can process disjoint index ranges in any order and
// the merged tallies stay identical for a fixed shard layout.
class SampleRng {
 public:
  SampleRng(uint64_t seed, uint64_t sample_index)
      : base_(splitmix64(splitmix64(seed) ^
                         (sample_index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL))) {}

  // Uniform in [0, 1), 53-bit resolution.
  double u(uint32_t slot) const {
    const uint64_t v = splitmix64(base_ + slot * 0xda942042e4dd58b5ULL);
    return static_cast<double>(v >> 11) * 0x1.0p-53;
  }

 private:
  uint64_t base_;
};

}  // namespace calsig
