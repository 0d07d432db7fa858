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

#include "calsig/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace calsig {

namespace {
constexpr double kMergeTol = 1e-12;
constexpr double kDropTol = 1e-15;
constexpr double kSumTol = 1e-9;
}  // namespace

DiscreteDist DiscreteDist::from_atoms(std::vector<std::pair<double, double>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  DiscreteDist d;
  for (const auto& [x, p] : atoms) {
    if (p < -1e-12) throw std::invalid_argument("dist: negative weight");
    if (x < -1e-12 || x > 1.0 + 1e-12)
      throw std::invalid_argument("dist: support value outside [0,1]");
    if (p <= kDropTol) continue;
    if (!d.xs.empty() && x - d.xs.back() <= kMergeTol) {
      d.ps.back() += p;
    } else {
      d.xs.push_back(std::min(1.0, std::max(0.0, x)));
      d.ps.push_back(p);
    }
  }
  double sum = 0.0;
  for (double p : d.ps) sum += p;
  if (std::abs(sum - 1.0) > kSumTol)
    throw std::invalid_argument("dist: weights sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-9");
  return d;
}

DiscreteDist DiscreteDist::point(double x) { return from_atoms({{x, 1.0}}); }

double DiscreteDist::mean() const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += xs[i] * ps[i];
  return s;
}

double DiscreteDist::mass_at(double x) const {
  for (int i = 0; i < size(); ++i)
    if (std::abs(xs[i] - x) <= kMergeTol) return ps[i];
  return 0.0;
}

double DiscreteDist::mass_geq(double x) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i)
    if (xs[i] >= x - kMergeTol) s += ps[i];
  return s;
}

std::vector<double> cluster_values(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  }
  return out;
}

}  // namespace calsig
