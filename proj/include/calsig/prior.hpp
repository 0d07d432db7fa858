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

#include <vector>

namespace calsig {

// Exchangeable click-outcome prior, stored by the number of clicking bidders.
// lambda[k] is the probability that exactly k of the n bidders would click;
// every profile with k ones has probability lambda[k] / C(n, k). The full
// 2^n table is never materialized.
struct PriorBySum {
  int n = 0;
  std::vector<double> lambda;  // size n + 1, entries >= 0, sums to 1 within 1e-12

  static PriorBySum from_lambdas(int n, std::vector<double> lambda);
  static PriorBySum from_bernoulli(int n, double p);

  double welfare() const;            // sum of lambda[k] for k >= 1
  double full_info_revenue() const;  // sum of lambda[k] for k >= 2
  double profile_prob(int k) const;  // lambda[k] / C(n, k)
};

// Exact binomial coefficient as a double (n up to ~60 stays exact).
double binom(int n, int k);

}  // namespace calsig
