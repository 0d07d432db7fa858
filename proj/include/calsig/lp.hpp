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

#include <utility>
#include <vector>

namespace calsig {

// Linear program in the form
//   maximize c^T x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;  // size num_vars

  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (var index, coefficient)
    double rhs = 0.0;
  };
  std::vector<Row> eq;
  std::vector<Row> ub;
};

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// Dense two-phase primal simplex with Bland's rule (no cycling).
// Pinned tolerances: feasibility 1e-10, optimality 1e-10.
LpSolution solve_lp(const LpProblem& p);

}  // namespace calsig
