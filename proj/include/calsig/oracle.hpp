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

#include "calsig/dist.hpp"
#include "calsig/marginals.hpp"
#include "calsig/prior.hpp"

namespace calsig {

// Exhaustive reference optimum: maximizes expected second-highest signal
// over every calibrated scheme supported on grid^n, one conditional
// distribution per click outcome. Exponential, so n <= 3 and small grids.
double grid_lp_optimal(const PriorBySum& prior, const std::vector<double>& grid);

// Reference optimum of a single coupling step: maximizes the expected
// second-highest coordinate over joint distributions with the given
// per-coordinate marginals (first k coordinates f1, the rest f0).
double brute_force_transport(int k, const DiscreteDist* f1, const DiscreteDist* f0,
                             int n);

struct MarginalScan {
  double x_star = 0.0;
  double value = 0.0;
};

// Maximizes the closed-form threshold objective by grid scan plus
// golden-section refinement, independently of the linear-system solver.
MarginalScan scan_marginal_objective(const PriorBySum& prior, int resolution,
                                     ThresholdConvention conv);

}  // namespace calsig
