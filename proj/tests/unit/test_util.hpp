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

#include <algorithm>
#include <random>
#include <vector>

#include "calsig/prior.hpp"

namespace calsig::testutil {

// Random prior whose classes 1 and n carry enough mass that the ladder
// designs accept moderate epsilon values. Floors are pre-normalization.
inline PriorBySum random_prior(std::mt19937_64& gen, int n, double floor0,
                               double floor1, double floorn) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> l(n + 1);
  for (double& v : l) v = u(gen);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int k = 2; k < n; ++k)
    if (coin(gen) == 0) l[k] = 0.0;
  l[0] = std::max(l[0], floor0);
  l[1] = std::max(l[1], floor1);
  l[n] = std::max(l[n], floorn);
  double s = 0.0;
  for (double v : l) s += v;
  for (double& v : l) v /= s;
  // The division leaves a few ulps of drift; park them on the largest entry
  // so the constructor's exact-sum gate stays quiet.
  double s2 = 0.0;
  for (double v : l) s2 += v;
  int arg = 0;
  for (int k = 0; k <= n; ++k)
    if (l[k] > l[arg]) arg = k;
  l[arg] -= s2 - 1.0;
  return PriorBySum::from_lambdas(n, l);
}

}  // namespace calsig::testutil
