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

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "calsig/dist.hpp"

namespace calsig {

// Joint bid profile distribution for one click class. Coordinates 0..k-1
// belong to clicking bidders (marginal f1), coordinates k..n-1 to the rest
// (marginal f0).
struct TransportRow {
  std::vector<double> bids;
  double w = 0.0;
};

struct TransportPlan {
  int n = 0;
  int k = 0;
  std::vector<TransportRow> rows;
};

double secmax_of_row(const std::vector<double>& bids);

struct PlanCheck {
  bool ok = false;
  double worst_marginal_dev = 0.0;
  double weight_sum = 0.0;
  std::string note;
};

// Verifies weights and per-coordinate marginals against (f1, f0) within tol.
PlanCheck check_plan_feasible(const TransportPlan& plan, const DiscreteDist* f1,
                              const DiscreteDist* f0, double tol);

// Couples the class marginals so that the second-highest bid is maximal in
// expectation: values are paired with themselves from the top down until unit
// mass is reached, and everything below rides along as filler coordinates.
// Every row has at least two coordinates at its maximum. Rejects k in
// {1, n-1}, where pairing inside one side is impossible.
TransportPlan correlate_general(int k, const DiscreteDist* f1, const DiscreteDist* f0,
                                int n);

DiscreteDist induced_secmax(const TransportPlan& plan);

// Upper bound on E[second-highest bid] over all couplings of (f1, f0):
// t_k + sum_{x > t_k} (x - t_k) * (k f1(x) + (n-k) f0(x)) / 2. Tight for
// k outside {1, n-1}; valid for every k.
double secmax_upper_bound(int k, const DiscreteDist* f1, const DiscreteDist* f0, int n);

// Optimal coupling for the one-click class as a two-variable transition:
// m(x, y) couples the clicker at x with the best losing bid y, h(y) covers
// rows where the top two are both non-clickers at y.
struct K1Solution {
  std::vector<std::tuple<double, double, double>> m;  // (x, y, weight), comonotone
  std::vector<std::pair<double, double>> h;           // (y, weight)
  double value = 0.0;
};

// Solves the class-1 coupling LP over the product of the two supports and
// applies the value-preserving monotone rearrangement to m. h is omitted
// for n == 2 (a second losing bidder does not exist).
K1Solution correlate_k1_lp(const DiscreteDist& f11, const DiscreteDist& f10, int n);

// Materializes a K1Solution into a full plan: bidder 1 takes x, one losing
// coordinate takes y, remaining coordinates take the lowest available f10
// values, and rows are rotated over the n-1 losing coordinates so each one
// has marginal exactly f10.
TransportPlan plan_from_k1(const K1Solution& sol, const DiscreteDist& f11,
                           const DiscreteDist& f10, int n);

// Reads the (m, h) transition off a class-1 plan (for validation).
struct K1Decomposition {
  std::map<std::pair<double, double>, double> m;
  std::map<double, double> h;
};
K1Decomposition k1_decompose(const TransportPlan& plan);

}  // namespace calsig
