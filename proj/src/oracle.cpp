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

#include "calsig/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "calsig/lp.hpp"
#include "calsig/transport.hpp"

namespace calsig {

double grid_lp_optimal(const PriorBySum& prior, const std::vector<double>& grid) {
  const int n = prior.n;
  if (n > 3) throw std::invalid_argument("grid_lp_optimal: supports n <= 3");
  const int g = static_cast<int>(grid.size());
  if (g < 1 || g > 12) throw std::invalid_argument("grid_lp_optimal: grid size must be 1..12");
  for (double v : grid)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("grid_lp_optimal: grid values in [0,1]");

  const int profiles = 1 << n;
  int tuples = 1;
  for (int i = 0; i < n; ++i) tuples *= g;
  const int nvars = profiles * tuples;  // q[o][x] = Pr[signals = x | outcome o]

  std::vector<int> digits(n, 0);
  std::vector<double> sec(tuples, 0.0);
  std::vector<double> bids(n, 0.0);
  for (int t = 0; t < tuples; ++t) {
    int rest = t;
    for (int i = 0; i < n; ++i) {
      digits[i] = rest % g;
      rest /= g;
      bids[i] = grid[digits[i]];
    }
    sec[t] = secmax_of_row(bids);
  }

  LpProblem lp;
  lp.num_vars = nvars;
  lp.objective.assign(nvars, 0.0);
  for (int o = 0; o < profiles; ++o) {
    const double pr = prior.profile_prob(std::popcount(static_cast<unsigned>(o)));
    for (int t = 0; t < tuples; ++t) lp.objective[o * tuples + t] = pr * sec[t];
  }

  for (int o = 0; o < profiles; ++o) {
    LpProblem::Row row;
    for (int t = 0; t < tuples; ++t) row.coeffs.emplace_back(o * tuples + t, 1.0);
    row.rhs = 1.0;
    lp.eq.push_back(std::move(row));
  }

  // Calibration: for bidder i and grid value v,
  //   sum_o Pr[o] o_i q(x_i = v | o) = v * sum_o Pr[o] q(x_i = v | o).
  int stride = 1;
  for (int i = 0; i < n; ++i) {
    for (int gi = 0; gi < g; ++gi) {
      LpProblem::Row row;
      const double v = grid[gi];
      for (int o = 0; o < profiles; ++o) {
        const double pr = prior.profile_prob(std::popcount(static_cast<unsigned>(o)));
        if (pr <= 0.0) continue;
        const double clicks = (o >> i) & 1 ? 1.0 : 0.0;
        const double coeff = pr * (clicks - v);
        if (coeff == 0.0) continue;
        for (int t = 0; t < tuples; ++t)
          if ((t / stride) % g == gi) row.coeffs.emplace_back(o * tuples + t, coeff);
      }
      row.rhs = 0.0;
      if (!row.coeffs.empty()) lp.eq.push_back(std::move(row));
    }
    stride *= g;
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpSolution::Status::optimal)
    throw std::runtime_error("grid_lp_optimal: infeasible grid");
  return sol.value;
}

double brute_force_transport(int k, const DiscreteDist* f1, const DiscreteDist* f0,
                             int n) {
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("brute_force_transport: bad k/n");
  if (k > 0 && (f1 == nullptr || f1->size() == 0))
    throw std::invalid_argument("brute_force_transport: f1 required");
  if (k < n && (f0 == nullptr || f0->size() == 0))
    throw std::invalid_argument("brute_force_transport: f0 required");

  std::vector<const DiscreteDist*> coord(n);
  for (int i = 0; i < n; ++i) coord[i] = i < k ? f1 : f0;
  long long tuples = 1;
  for (int i = 0; i < n; ++i) {
    tuples *= coord[i]->size();
    if (tuples > 1000000) throw std::invalid_argument("brute_force_transport: too many atoms");
  }

  LpProblem lp;
  lp.num_vars = static_cast<int>(tuples);
  lp.objective.assign(lp.num_vars, 0.0);
  std::vector<double> bids(n, 0.0);
  for (int t = 0; t < lp.num_vars; ++t) {
    int rest = t;
    for (int i = 0; i < n; ++i) {
      bids[i] = coord[i]->xs[rest % coord[i]->size()];
      rest /= coord[i]->size();
    }
    lp.objective[t] = secmax_of_row(bids);
  }

  int stride = 1;
  for (int i = 0; i < n; ++i) {
    const int sz = coord[i]->size();
    for (int a = 0; a < sz; ++a) {
      LpProblem::Row row;
      for (int t = 0; t < lp.num_vars; ++t)
        if ((t / stride) % sz == a) row.coeffs.emplace_back(t, 1.0);
      row.rhs = coord[i]->ps[a];
      lp.eq.push_back(std::move(row));
    }
    stride *= sz;
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpSolution::Status::optimal)
    throw std::runtime_error("brute_force_transport: marginal system infeasible");
  return sol.value;
}

namespace {

double threshold_objective(const PriorBySum& prior, double x, ThresholdConvention conv) {
  const double l0 = prior.lambda[0];
  const double l1 = prior.lambda[1];
  double a = 0.0, tail = 0.0;
  for (int k = 2; k <= prior.n; ++k) {
    a += (k - 2.0) * prior.lambda[k];
    tail += prior.lambda[k];
  }
  const double y = a - x;
  const double t1 = 2.0 * l1 + x > 0.0 ? (l1 + x) / (2.0 * l1 + x) : 0.5;
  double t0 = 0.0;
  if (conv == ThresholdConvention::appendix) {
    t0 = 2.0 * l0 + y > 0.0 ? y / (2.0 * l0 + y) : 0.0;
  } else {
    t0 = l0 + y > 0.0 ? y / (l0 + y) : 0.0;
  }
  return l1 * t1 + l0 * t0 + tail;
}

}  // namespace

MarginalScan scan_marginal_objective(const PriorBySum& prior, int resolution,
                                     ThresholdConvention conv) {
  if (resolution < 1000)
    throw std::invalid_argument("scan_marginal_objective: resolution must be >= 1000");
  double a = 0.0;
  for (int k = 2; k <= prior.n; ++k) a += (k - 2.0) * prior.lambda[k];

  MarginalScan best;
  best.x_star = 0.0;
  best.value = threshold_objective(prior, 0.0, conv);
  if (a <= 0.0) return best;

  int besti = 0;
  for (int i = 1; i <= resolution; ++i) {
    const double x = a * i / resolution;
    const double v = threshold_objective(prior, x, conv);
    if (v > best.value) {
      best.value = v;
      best.x_star = x;
      besti = i;
    }
  }

  // Golden-section refinement on the bracketing interval; the objective is
  // concave in x so the bracket keeps the maximizer.
  double lo = a * std::max(0, besti - 1) / resolution;
  double hi = a * std::min(resolution, besti + 1) / resolution;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double v1 = threshold_objective(prior, x1, conv);
  double v2 = threshold_objective(prior, x2, conv);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, a); ++it) {
    if (v1 >= v2) {
      hi = x2;
      x2 = x1;
      v2 = v1;
      x1 = hi - phi * (hi - lo);
      v1 = threshold_objective(prior, x1, conv);
    } else {
      lo = x1;
      x1 = x2;
      v1 = v2;
      x2 = lo + phi * (hi - lo);
      v2 = threshold_objective(prior, x2, conv);
    }
  }
  const double xm = 0.5 * (lo + hi);
  const double vm = threshold_objective(prior, xm, conv);
  if (vm > best.value) {
    best.value = vm;
    best.x_star = xm;
  }
  return best;
}

}  // namespace calsig
