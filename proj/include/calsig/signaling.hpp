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
#include <map>
#include <string>
#include <vector>

#include "calsig/dist.hpp"
#include "calsig/marginals.hpp"
#include "calsig/prior.hpp"
#include "calsig/transport.hpp"

namespace calsig {

struct SignalingMeta {
  std::string variant;  // "optimal", "ir", "full_information", "symmetrized"
  ThresholdConvention convention = ThresholdConvention::appendix;
  double t1 = 0.0;
  double t0 = 0.0;
  int region = 0;
  bool threshold_fallback = false;
  bool threshold_flagged = false;

  // Set only on the individually rational variant.
  bool has_ir = false;
  double epsilon = 0.0;
  int M = 0;
  std::vector<double> levels;  // serrated calibrated-bid ladder, ascending
  double t0_ir = 0.0;
  double ir_deduction = 0.0;
};

// A scheme in symmetric form: per-class signal marginals plus one transport
// plan per click count realizing them. Bidders bid their signals, so the
// plan rows double as bid profiles.
struct CalibratedSignaling {
  PriorBySum prior;
  MarginalFamily family;
  std::vector<TransportPlan> plans;  // index by click count; empty when lambda[k] == 0
  SignalingMeta meta;
};

// Builds the transport plan realizing the class-k marginals of a family.
// Classes with two bidders on one side pair greedily; a single clicker goes
// through the coupling program; a single loser is pinned at 0 and the
// clicking side pairs among itself.
TransportPlan plan_for_class(int k, const MarginalFamily& fam);

// Revenue-optimal scheme for the prior (expected second-highest signal).
CalibratedSignaling design_optimal(
    const PriorBySum& prior,
    ThresholdConvention conv = ThresholdConvention::appendix);

// Degenerate benchmark: every bidder learns their own click outcome.
CalibratedSignaling full_information(const PriorBySum& prior);

// Expected second-highest bid under the prior.
double revenue(const CalibratedSignaling& sig);

// Distribution of the second-highest bid given the click count.
DiscreteDist conditional_secmax(const CalibratedSignaling& sig, int k);

struct SignalCalibration {
  bool calibrated = false;
  double worst_dev = 0.0;
  double worst_value = 0.0;
  struct Row {
    double value = 0.0;
    double impressions = 0.0;  // probability mass of the signal being sent
    double clicks = 0.0;       // mass where the receiver then clicks
  };
  std::vector<Row> rows;
};

// Checks E[click | signal value] == value for every sent value.
SignalCalibration verify_calibration(const CalibratedSignaling& sig,
                                     double tol = 1e-9);

// A scheme given as raw conditional bid rows per click outcome, not assumed
// symmetric. Outcome keys are bitmasks with bit i set when bidder i clicks.
struct RawSignaling {
  int n = 0;
  struct Row {
    std::vector<double> bids;
    double w = 0.0;
  };
  std::map<std::uint32_t, std::vector<Row>> rows;
};

// Expected second-highest bid of a raw scheme under the prior.
double raw_revenue(const RawSignaling& raw, const PriorBySum& prior);

// Averages a raw scheme over all bidder relabelings, producing the
// exchangeable per-class form. Preserves revenue and calibration.
CalibratedSignaling symmetrize(const RawSignaling& raw, const PriorBySum& prior);

}  // namespace calsig
