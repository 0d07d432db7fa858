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

#include "calsig/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calsig {

double min_secmax(int k, const DiscreteDist* f1, const DiscreteDist* f0, int n) {
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("min_secmax: bad k/n");
  if (k > 0 && f1 == nullptr) throw std::invalid_argument("min_secmax: f1 required");
  if (k < n && f0 == nullptr) throw std::invalid_argument("min_secmax: f0 required");

  std::vector<double> support;
  if (k > 0) support.insert(support.end(), f1->xs.begin(), f1->xs.end());
  if (k < n) support.insert(support.end(), f0->xs.begin(), f0->xs.end());
  support = cluster_values(std::move(support), 1e-12);

  double cum = 0.0;
  for (int i = static_cast<int>(support.size()) - 1; i >= 0; --i) {
    const double v = support[i];
    double avail = 0.0;
    if (k > 0) avail += k * f1->mass_at(v);
    if (k < n) avail += (n - k) * f0->mass_at(v);
    cum += 0.5 * avail;
    if (cum >= 1.0 - 1e-9) return v;
  }
  // Total capacity is n/2 >= 1, so the scan always terminates above.
  return support.empty() ? 0.0 : support.front();
}

CalibrationReport check_calibration_feasible(const PriorBySum& prior,
                                             const MarginalFamily& fam, double tol) {
  const int n = prior.n;
  if (fam.n != n) throw std::invalid_argument("calibration check: n mismatch");

  std::vector<double> values;
  for (int k = 1; k <= n; ++k)
    if (prior.lambda[k] > 0.0)
      values.insert(values.end(), fam.f1[k].xs.begin(), fam.f1[k].xs.end());
  for (int k = 0; k < n; ++k)
    if (prior.lambda[k] > 0.0)
      values.insert(values.end(), fam.f0[k].xs.begin(), fam.f0[k].xs.end());
  values = cluster_values(std::move(values), 1e-12);

  CalibrationReport rep;
  rep.feasible = true;
  for (double x : values) {
    double clicks = 0.0, zeros = 0.0;
    for (int k = 1; k <= n; ++k)
      if (prior.lambda[k] > 0.0) clicks += prior.lambda[k] * k * fam.f1[k].mass_at(x);
    for (int k = 0; k < n; ++k)
      if (prior.lambda[k] > 0.0) zeros += prior.lambda[k] * (n - k) * fam.f0[k].mass_at(x);
    const double viol =
        x <= 1e-12 ? clicks : std::abs(x * (clicks + zeros) - clicks);
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.offending_value = x;
    }
  }
  rep.feasible = rep.worst_violation <= tol;
  return rep;
}

LinSysSolution solve_linsys(const PriorBySum& prior) {
  const int n = prior.n;
  const std::vector<double>& lam = prior.lambda;
  if (lam[n] <= 0.0)
    throw std::invalid_argument("linsys: top class needs positive mass");
  if (lam[0] <= 0.0 && lam[1] <= 0.0)
    throw std::invalid_argument("linsys: classes 0 and 1 both empty");

  LinSysSolution s;
  s.n = n;
  s.a.assign(n + 1, 0.0);
  s.b.assign(n + 1, 0.0);

  double A = 0.0;
  for (int k = 2; k <= n; ++k) A += (k - 2) * lam[k];

  const double l0 = lam[0], l1 = lam[1];
  double x_target;
  const double denom = l1 + std::sqrt(2.0) * l0;
  if (denom <= 0.0) {
    // Both lambda0 and lambda1 vanish is rejected above; this branch is
    // unreachable but keeps the expression total.
    x_target = A;
  } else {
    x_target = (l1 * A + 2.0 * l1 * l0 * (1.0 - std::sqrt(2.0))) / denom;
  }
  x_target = std::min(A, std::max(0.0, x_target));

  // Waterfall from the top class down. Class n keeps a small reserve so b[n]
  // stays strictly positive whenever (n-2)/n allows it.
  double rem = x_target;
  for (int k = n; k >= 2; --k) {
    const double cap_full = static_cast<double>(k - 2) / k;
    s.b[k] = cap_full;
    if (lam[k] <= 0.0) continue;
    double cap = cap_full;
    if (k == n) cap = std::max(0.0, cap_full - std::min(1e-9, cap_full));
    const double take = std::min(cap, rem / (lam[k] * k));
    s.a[k] = take;
    s.b[k] = cap_full - take;
    rem -= take * lam[k] * k;
    if (rem < 0.0) rem = 0.0;
  }

  for (int k = 2; k <= n; ++k) {
    s.x_star += lam[k] * k * s.a[k];
    s.y_star += lam[k] * k * s.b[k];
  }
  if (n == 2) {
    s.degenerate = true;
    s.note = "two bidders force a[2] = b[2] = 0";
  } else if (s.b[n] <= 0.0) {
    s.degenerate = true;
    s.note = "b[n] pinned at zero";
  }
  return s;
}

Thresholds optimal_thresholds(const PriorBySum& prior, const LinSysSolution& lin,
                              ThresholdConvention conv) {
  const double l0 = prior.lambda[0], l1 = prior.lambda[1];
  const double x = lin.x_star, y = lin.y_star;

  Thresholds th;
  th.used = conv;

  if (l1 <= 0.0 && x <= 0.0) {
    th.t1 = 0.5;
    th.flagged = true;
    th.note = "class 1 empty; t1 defaulted to 1/2";
  } else {
    th.t1 = (l1 + x) / (2.0 * l1 + x);
  }

  auto t0_of = [&](ThresholdConvention c) {
    if (l0 <= 0.0) return 0.0;
    const double d = c == ThresholdConvention::appendix ? 2.0 * l0 + y : l0 + y;
    return d <= 0.0 ? 0.0 : y / d;
  };
  if (l0 <= 0.0) {
    th.t0 = 0.0;
    th.flagged = true;
    if (!th.note.empty()) th.note += "; ";
    th.note += "class 0 empty; t0 defaulted to 0";
    return th;
  }

  th.t0 = t0_of(conv);
  const auto ok = [&](double t0, double t1) {
    return t0 <= t1 + 1e-12 && t1 >= 0.5 - 1e-12;
  };
  if (!ok(th.t0, th.t1)) {
    const ThresholdConvention other = conv == ThresholdConvention::appendix
                                          ? ThresholdConvention::main_text
                                          : ThresholdConvention::appendix;
    const double alt = t0_of(other);
    if (ok(alt, th.t1)) {
      th.t0 = alt;
      th.used = other;
      th.fallback = true;
      if (!th.note.empty()) th.note += "; ";
      th.note += "requested convention broke t0<=t1; fell back";
    }
  }
  return th;
}

Thresholds optimal_thresholds(const PriorBySum& prior, ThresholdConvention conv) {
  return optimal_thresholds(prior, solve_linsys(prior), conv);
}

MarginalFamily optimal_marginals(const PriorBySum& prior, const LinSysSolution& lin,
                                 const Thresholds& th) {
  const int n = prior.n;
  MarginalFamily fam;
  fam.n = n;
  fam.f1.resize(n + 1);
  fam.f0.resize(n + 1);

  fam.f1[1] = DiscreteDist::point(th.t1);
  for (int k = 2; k <= n; ++k) {
    fam.f1[k] = DiscreteDist::from_atoms(
        {{1.0, 2.0 / k}, {th.t1, lin.a[k]}, {th.t0, lin.b[k]}});
  }
  fam.f0[0] = DiscreteDist::from_atoms(
      {{th.t0, 2.0 / n}, {0.0, static_cast<double>(n - 2) / n}});
  fam.f0[1] = DiscreteDist::from_atoms(
      {{th.t1, 1.0 / (n - 1)}, {0.0, static_cast<double>(n - 2) / (n - 1)}});
  for (int k = 2; k < n; ++k) fam.f0[k] = DiscreteDist::point(0.0);
  return fam;
}

MarginalFamily optimal_marginals(const PriorBySum& prior, ThresholdConvention conv) {
  const LinSysSolution lin = solve_linsys(prior);
  const Thresholds th = optimal_thresholds(prior, lin, conv);
  return optimal_marginals(prior, lin, th);
}

int region_of(const PriorBySum& prior, const Thresholds& th) {
  const double gap = prior.lambda[0] * th.t0 - prior.lambda[1] * (1.0 - th.t1);
  return gap > 1e-12 ? 2 : 1;
}

}  // namespace calsig
