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

#include "calsig/prior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace calsig {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

PriorBySum PriorBySum::from_lambdas(int n, std::vector<double> lambda) {
  if (n < 2) throw std::invalid_argument("prior: need at least 2 bidders");
  if (static_cast<int>(lambda.size()) != n + 1)
    throw std::invalid_argument("prior: lambda must have n+1 entries, got " +
                                std::to_string(lambda.size()));
  double sum = 0.0;
  for (double v : lambda) {
    if (v < -1e-15) throw std::invalid_argument("prior: negative lambda entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("prior: lambda sums to " + std::to_string(sum) +
                                ", expected 1 within 1e-12");
  PriorBySum p;
  p.n = n;
  p.lambda = std::move(lambda);
  for (double& v : p.lambda)
    if (v < 0.0) v = 0.0;
  return p;
}

PriorBySum PriorBySum::from_bernoulli(int n, double p) {
  if (n < 2) throw std::invalid_argument("prior: need at least 2 bidders");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("prior: p must be in [0,1]");
  std::vector<double> lam(n + 1);
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    lam[k] = binom(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
    sum += lam[k];
  }
  // Renormalize the last rounding shavings so downstream sum checks are exact.
  for (double& v : lam) v /= sum;
  return from_lambdas(n, std::move(lam));
}

double PriorBySum::welfare() const {
  double s = 0.0;
  for (int k = 1; k <= n; ++k) s += lambda[k];
  return s;
}

double PriorBySum::full_info_revenue() const {
  double s = 0.0;
  for (int k = 2; k <= n; ++k) s += lambda[k];
  return s;
}

double PriorBySum::profile_prob(int k) const {
  if (k < 0 || k > n) throw std::invalid_argument("prior: class out of range");
  return lambda[k] / binom(n, k);
}

}  // namespace calsig
