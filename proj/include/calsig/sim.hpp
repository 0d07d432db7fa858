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
#include <vector>

#include "calsig/signaling.hpp"

namespace calsig {

struct SimOptions {
  long long samples = 1000000;
  std::uint64_t seed = 1;
};

// Reports are a pure function of (scheme, samples, seed): each sample's
// randomness is keyed by its global index, work is split into 16 fixed
// shards, and shard results merge in index order. Thread count only limits
// how many shards run at once.
struct SimReport {
  long long samples = 0;
  std::uint64_t seed = 0;
  int shards = 16;
  double revenue_mean = 0.0;
  double revenue_stderr = 0.0;
  struct CalRow {
    double value = 0.0;
    long long impressions = 0;
    long long clicks = 0;
  };
  std::vector<CalRow> calibration;  // exact-value buckets, ascending
  std::vector<double> utility_mean;
  std::vector<double> utility_stderr;
};

SimReport simulate(const CalibratedSignaling& sig, const SimOptions& opt);

}  // namespace calsig
