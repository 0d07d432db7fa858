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

#include "calsig/marginals.hpp"
#include "calsig/prior.hpp"
#include "calsig/signaling.hpp"

namespace calsig {

// Discretization ladder for the participation-safe scheme. Levels sit at
// t[j] = (l1 + c + u)/(2*l1 + c + u) for u running across [-eps^2/2,
// +eps^2/2) in 2M steps, with t[2M] = 1 on top. r[j] is the weight of the
// class-1 step whose losing bid is t[j]; the weights satisfy the one-step
// recursion that makes every ladder value exactly calibrated.
struct SerratedSequence {
  int M = 0;
  double eps = 0.0;
  double c_star = 0.0;
  std::vector<double> t;  // size 2M + 1, ascending, t[2M] == 1
  std::vector<double> r;  // size 2M, sums to 1
};

// Builds the ladder, validating eps against the prior. Throws
// std::invalid_argument naming the violated bound when eps is too large.
SerratedSequence serrated_sequence(const PriorBySum& prior, double eps);

// Low-threshold signal value of the participation-safe scheme: the optimal
// t0 where bidder surplus already covers the losses, otherwise the value
// that makes the total surplus exactly zero.
double ir_threshold_t0(const PriorBySum& prior, const SerratedSequence& seq,
                       int region, const Thresholds& th);

// Marginal family of the participation-safe scheme together with the
// bookkeeping needed to materialize and audit it.
struct IrMarginalFamily {
  MarginalFamily fam;
  std::vector<double> b_ir;  // per-class mass at t0_ir
  std::vector<double> park;  // per-class extra mass pinned at 1
  double d = 0.0;            // class-n mass moved to the bottom ladder level
  double t0_ir = 0.0;
  int region = 0;
  SerratedSequence seq;
  LinSysSolution lin;
  Thresholds th;
};

IrMarginalFamily ir_marginals(
    const PriorBySum& prior, double eps,
    ThresholdConvention conv = ThresholdConvention::appendix);

// Full participation-safe scheme with materialized plans.
CalibratedSignaling design_ir(
    const PriorBySum& prior, double eps,
    ThresholdConvention conv = ThresholdConvention::appendix);

struct UtilityReport {
  std::vector<double> per_bidder;  // equal entries; roles rotate uniformly
  std::vector<double> per_class;   // prior-weighted surplus by click count
  double total = 0.0;
};

// Expected winner surplus (click value minus price) under the scheme.
UtilityReport exante_utility(const CalibratedSignaling& sig);

// Closed-form comparison of the designs for one prior, computed without
// materializing any plan. Safe for very small eps.
struct IrSummary {
  double epsilon = 0.0;
  int M = 0;
  int region = 0;
  double t1 = 0.0;
  double t0 = 0.0;
  double t0_ir = 0.0;
  double welfare = 0.0;
  double rev_opt = 0.0;
  double rev_ir = 0.0;
  double rev_full = 0.0;
  bool valid = true;
  std::string validity_note;
};

IrSummary ir_design_summary(const PriorBySum& prior, double eps,
                            bool enforce_validity);

}  // namespace calsig
