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

#include "calsig/lp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace calsig {

namespace {

constexpr double kFeasTol = 1e-10;
constexpr double kOptTol = 1e-10;

// Dense tableau: rows = constraints, one extra row for the objective,
// one extra column for the rhs. Basis[i] is the variable basic in row i.
struct Tableau {
  int m = 0;       // constraint rows
  int n = 0;       // columns (variables incl. slacks/artificials)
  std::vector<double> t;  // (m+1) x (n+1), row-major; row m = objective
  std::vector<int> basis;

  double& at(int i, int j) { return t[static_cast<size_t>(i) * (n + 1) + j]; }
  double at(int i, int j) const { return t[static_cast<size_t>(i) * (n + 1) + j]; }
  double& rhs(int i) { return t[static_cast<size_t>(i) * (n + 1) + n]; }
  double rhs(int i) const { return t[static_cast<size_t>(i) * (n + 1) + n]; }

  void pivot(int pr, int pc) {
    const double pv = at(pr, pc);
    const double inv = 1.0 / pv;
    double* prow = &t[static_cast<size_t>(pr) * (n + 1)];
    for (int j = 0; j <= n; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (int i = 0; i <= m; ++i) {
      if (i == pr) continue;
      double* row = &t[static_cast<size_t>(i) * (n + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  // Bland: entering = smallest-index column with reduced objective gain,
  // leaving = smallest ratio, ties broken by smallest basis variable index.
  // Objective row holds z_j - c_j negated so "improving" means row value > tol.
  // Returns 0 = optimal, 1 = pivoted, -1 = unbounded.
  int step(int limit_cols) {
    int pc = -1;
    for (int j = 0; j < limit_cols; ++j) {
      if (at(m, j) > kOptTol) {
        pc = j;
        break;
      }
    }
    if (pc < 0) return 0;
    int pr = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = at(i, pc);
      if (a <= kFeasTol) continue;
      const double ratio = rhs(i) / a;
      if (pr < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[pr])) {
        pr = i;
        best = ratio;
      }
    }
    if (pr < 0) return -1;
    pivot(pr, pc);
    return 1;
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  const int nv = p.num_vars;
  if (static_cast<int>(p.objective.size()) != nv)
    throw std::invalid_argument("solve_lp: objective size mismatch");

  const int n_ub = static_cast<int>(p.ub.size());
  const int n_eq = static_cast<int>(p.eq.size());
  const int m = n_ub + n_eq;

  // Column layout: [structural 0..nv) [slack/surplus nv..nv+n_ub) [artificials ...).
  // Rows are sign-normalized so every rhs is >= 0; a <= row with negative rhs
  // becomes a >= row and needs a surplus column plus an artificial.
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  std::vector<char> row_needs_art(m, 0);
  for (int r = 0; r < n_ub; ++r)
    if (p.ub[r].rhs < 0.0) row_needs_art[r] = 1;
  for (int r = 0; r < n_eq; ++r) row_needs_art[n_ub + r] = 1;
  for (int r = 0; r < m; ++r)
    if (row_needs_art[r]) art_of_row[r] = n_art++;

  Tableau tb;
  tb.m = m;
  tb.n = nv + n_ub + n_art;
  tb.t.assign(static_cast<size_t>(m + 1) * (tb.n + 1), 0.0);
  tb.basis.assign(m, -1);

  for (int r = 0; r < n_ub; ++r) {
    const double sgn = p.ub[r].rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [j, c] : p.ub[r].coeffs) {
      if (j < 0 || j >= nv) throw std::invalid_argument("solve_lp: bad var index");
      tb.at(r, j) += sgn * c;
    }
    tb.at(r, nv + r) = sgn;  // slack (+1) or surplus (-1)
    tb.rhs(r) = sgn * p.ub[r].rhs;
    if (art_of_row[r] >= 0) {
      tb.at(r, nv + n_ub + art_of_row[r]) = 1.0;
      tb.basis[r] = nv + n_ub + art_of_row[r];
    } else {
      tb.basis[r] = nv + r;
    }
  }
  for (int q = 0; q < n_eq; ++q) {
    const int r = n_ub + q;
    const double sgn = p.eq[q].rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [j, c] : p.eq[q].coeffs) {
      if (j < 0 || j >= nv) throw std::invalid_argument("solve_lp: bad var index");
      tb.at(r, j) += sgn * c;
    }
    tb.rhs(r) = sgn * p.eq[q].rhs;
    tb.at(r, nv + n_ub + art_of_row[r]) = 1.0;
    tb.basis[r] = nv + n_ub + art_of_row[r];
  }

  LpSolution sol;

  if (n_art > 0) {
    // Phase 1: maximize -(sum of artificials). Objective row starts as the
    // sum of the artificial rows so reduced costs are consistent with the basis.
    for (int r = 0; r < m; ++r) {
      if (art_of_row[r] < 0) continue;
      for (int j = 0; j <= tb.n; ++j) tb.at(m, j) += tb.at(r, j);
    }
    for (int a = 0; a < n_art; ++a) tb.at(m, nv + n_ub + a) = 0.0;

    while (true) {
      const int s = tb.step(tb.n);
      if (s == 0) break;
      if (s == -1) throw std::runtime_error("solve_lp: phase 1 unbounded");
    }
    if (tb.rhs(m) > 1e-7) {
      sol.status = LpSolution::Status::infeasible;
      return sol;
    }
    // Drive residual artificials out of the basis; a row with no eligible
    // pivot column is redundant and is blanked.
    for (int r = 0; r < m; ++r) {
      if (tb.basis[r] < nv + n_ub) continue;
      int pc = -1;
      for (int j = 0; j < nv + n_ub; ++j) {
        if (std::abs(tb.at(r, j)) > 1e-9) {
          pc = j;
          break;
        }
      }
      if (pc >= 0) {
        tb.pivot(r, pc);
      } else {
        for (int j = 0; j <= tb.n; ++j) tb.at(r, j) = 0.0;
        tb.rhs(r) = 0.0;
      }
    }
  }

  // Phase 2 objective row: z_j - c_j expressed over the current basis.
  const int cols2 = nv + n_ub;
  for (int j = 0; j <= tb.n; ++j) tb.at(m, j) = 0.0;
  for (int j = 0; j < nv; ++j) tb.at(m, j) = p.objective[j];
  for (int r = 0; r < m; ++r) {
    const int b = tb.basis[r];
    if (b < 0 || b >= nv) continue;
    const double cb = p.objective[b];
    if (cb == 0.0) continue;
    for (int j = 0; j <= tb.n; ++j) tb.at(m, j) -= cb * tb.at(r, j);
    tb.at(m, b) = 0.0;
  }
  // Keep artificial columns unattractive in phase 2.
  for (int a = 0; a < n_art; ++a) tb.at(m, nv + n_ub + a) = -1.0;

  while (true) {
    const int s = tb.step(cols2);
    if (s == 0) break;
    if (s == -1) {
      sol.status = LpSolution::Status::unbounded;
      return sol;
    }
  }

  sol.status = LpSolution::Status::optimal;
  sol.x.assign(nv, 0.0);
  for (int r = 0; r < m; ++r) {
    if (tb.basis[r] >= 0 && tb.basis[r] < nv) {
      double v = tb.rhs(r);
      if (v < 0.0 && v > -1e-9) v = 0.0;
      sol.x[tb.basis[r]] = v;
    }
  }
  double val = 0.0;
  for (int j = 0; j < nv; ++j) val += p.objective[j] * sol.x[j];
  sol.value = val;
  return sol;
}

}  // namespace calsig
