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

#include <string>
#include <vector>

#include "calsig/dist.hpp"
#include "calsig/prior.hpp"

namespace calsig {

// Per-class bid marginals of a symmetric signaling: when k bidders click,
// every clicking bidder's bid is distributed as f1[k] and every other
// bidder's as f0[k]. f1[k] is meaningful for k in [1..n], f0[k] for
// k in [0..n-1]; the unused slots stay empty.
struct MarginalFamily {
  int n = 0;
  std::vector<DiscreteDist> f1;  // size n + 1
  std::vector<DiscreteDist> f0;  // size n + 1
};

// Split of each class-k click marginal's non-unit mass between the two
// optimal thresholds: a[k] goes to the upper one, b[k] to the lower one,
// a[k] + b[k] = (k-2)/k for k in [2..n]. x_star/y_star are the achieved
// sums of lambda[k]*k*a[k] and lambda[k]*k*b[k].
struct LinSysSolution {
  int n = 0;
  std::vector<double> a;  // size n + 1, valid k in [2..n]
  std::vector<double> b;  // size n + 1, valid k in [2..n]
  double x_star = 0.0;
  double y_star = 0.0;
  bool degenerate = false;
  std::string note;
};

// t0 has two published denominators; the realizable one (full pair mass at
// t0 in the zero-click class) uses 2*lambda0 and is the default everywhere.
enum class ThresholdConvention { appendix, main_text };

struct Thresholds {
  double t1 = 0.0;
  double t0 = 0.0;
  ThresholdConvention used = ThresholdConvention::appendix;
  bool fallback = false;  // requested convention violated t0<=t1 or t1>=0.5
  bool flagged = false;   // degenerate guard hit (lambda1 == 0 or lambda0 == 0)
  std::string note;
};

// Largest value t such that the pair-capacity mass at or above t reaches 1:
// sup { t : sum_{x >= t} (k*f1(x) + (n-k)*f0(x)) / 2 >= 1 }. This is the
// lowest achievable E[second-highest bid] support point for class k.
// f1 may be null when k == 0, f0 may be null when k == n.
double min_secmax(int k, const DiscreteDist* f1, const DiscreteDist* f0, int n);

struct CalibrationReport {
  bool feasible = false;
  double worst_violation = 0.0;
  double offending_value = 0.0;
};

// Checks the aggregate consistency condition that makes a marginal family
// realizable by a calibrated signaling: for every bid value x > 0,
// x * D(x) = N(x) where N(x) = sum_k lambda_k k f1_k(x) and
// D(x) = N(x) + sum_k lambda_k (n-k) f0_k(x); at x = 0, N(0) = 0.
CalibrationReport check_calibration_feasible(const PriorBySum& prior,
                                             const MarginalFamily& fam, double tol);

// Revenue-optimal split of the movable click mass between the two thresholds.
// Requires lambda[n] > 0 and lambda[0] + lambda[1] > 0.
LinSysSolution solve_linsys(const PriorBySum& prior);

Thresholds optimal_thresholds(const PriorBySum& prior, ThresholdConvention conv);
Thresholds optimal_thresholds(const PriorBySum& prior, const LinSysSolution& lin,
                              ThresholdConvention conv);

// The revenue-optimal marginal family for the prior: class k >= 2 click
// marginals put 2/k at 1 and split the rest between t1 (a[k]) and t0 (b[k]);
// class 1 clicks at t1; the zero-click class pairs 2/n at t0.
MarginalFamily optimal_marginals(const PriorBySum& prior, const LinSysSolution& lin,
                                 const Thresholds& th);
MarginalFamily optimal_marginals(const PriorBySum& prior, ThresholdConvention conv);

// Region of the prior: 1 when the optimal design leaves bidders weakly
// better off than no participation, 2 when it extracts above welfare.
int region_of(const PriorBySum& prior, const Thresholds& th);

}  // namespace calsig
