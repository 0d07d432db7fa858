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

#include "calsig/ir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "calsig/transport.hpp"

namespace calsig {

namespace {

std::string eps_violation(const PriorBySum& prior, double eps) {
  const double l1 = prior.lambda[1];
  const double ln = prior.lambda[prior.n];
  if (!(eps > 0.0)) return "epsilon must be positive";
  if (l1 <= 0.0) return "class-1 mass must be positive";
  if (ln <= 0.0) return "top-class mass must be positive";
  const double cap = std::min(std::sqrt(l1), 4.0 * ln / l1);
  if (eps > cap + 1e-15) {
    std::ostringstream os;
    os << "epsilon exceeds min(sqrt(lambda[1]), 4*lambda[n]/lambda[1]) = " << cap;
    return os.str();
  }
  return "";
}

// Ladder construction without the eps-validity gate, shared by the strict
// builder and the non-enforcing closed-form summary.
SerratedSequence build_ladder(const PriorBySum& prior, double eps,
                              const LinSysSolution& lin) {
  if (!(eps > 0.0)) throw std::invalid_argument("serrated_sequence: epsilon must be positive");
  if (prior.lambda[1] <= 0.0)
    throw std::invalid_argument("serrated_sequence: class-1 mass must be positive");
  SerratedSequence seq;
  seq.eps = eps;
  seq.c_star = lin.x_star;
  seq.M = static_cast<int>(std::ceil(1.0 / eps - 1e-12));
  if (seq.M < 1) seq.M = 1;
  if (seq.M > 10000000)
    throw std::invalid_argument("serrated_sequence: epsilon too small, ladder too long");
  const int M = seq.M;
  const double l1 = prior.lambda[1];
  const double c = lin.x_star;
  seq.t.resize(2 * M + 1);
  seq.r.assign(2 * M, 0.0);
  for (int j = 0; j < 2 * M; ++j) {
    const double u = (static_cast<double>(j - M) / (2.0 * M)) * eps * eps;
    seq.t[j] = (l1 + c + u) / (2.0 * l1 + c + u);
  }
  seq.t[2 * M] = 1.0;
  // One calibration equation per interior level fixes each weight ratio.
  seq.r[2 * M - 1] = 1.0;
  for (int j = 2 * M - 1; j >= 1; --j) {
    const double u = (static_cast<double>(j - M) / (2.0 * M)) * eps * eps;
    seq.r[j - 1] = seq.r[j] * (1.0 + u / l1);
  }
  const double sum = std::accumulate(seq.r.begin(), seq.r.end(), 0.0);
  for (double& w : seq.r) w /= sum;
  return seq;
}

}  // namespace

SerratedSequence serrated_sequence(const PriorBySum& prior, double eps) {
  const std::string bad = eps_violation(prior, eps);
  if (!bad.empty()) throw std::invalid_argument("serrated_sequence: " + bad);
  return build_ladder(prior, eps, solve_linsys(prior));
}

double ir_threshold_t0(const PriorBySum& prior, const SerratedSequence& seq,
                       int region, const Thresholds& th) {
  if (region == 1) return th.t0;
  if (prior.lambda[0] <= 0.0)
    throw std::invalid_argument("ir_threshold_t0: surplus-neutral threshold needs lambda[0] > 0");
  double s = 0.0;
  for (int j = 0; j < 2 * seq.M; ++j) s += seq.r[j] * (1.0 - seq.t[j]);
  return prior.lambda[1] * s / prior.lambda[0];
}

IrMarginalFamily ir_marginals(const PriorBySum& prior, double eps,
                              ThresholdConvention conv) {
  const std::string bad = eps_violation(prior, eps);
  if (!bad.empty()) throw std::invalid_argument("ir_marginals: " + bad);

  IrMarginalFamily out;
  out.lin = solve_linsys(prior);
  out.th = optimal_thresholds(prior, out.lin, conv);
  out.region = region_of(prior, out.th);
  out.seq = build_ladder(prior, eps, out.lin);

  const int n = prior.n;
  const int M = out.seq.M;
  const double l1 = prior.lambda[1];
  const double ln = prior.lambda[n];

  out.d = out.seq.r[0] * (l1 - 0.5 * eps * eps) / (n * ln);
  if (out.d > 2.0 / n - 1e-15)
    throw std::invalid_argument(
        "ir_marginals: bottom-level mass exceeds the top atom, reduce epsilon");

  out.t0_ir = ir_threshold_t0(prior, out.seq, out.region, out.th);
  if (out.seq.t[0] <= out.t0_ir + 1e-12)
    throw std::invalid_argument(
        "ir_marginals: ladder reaches the low threshold, reduce epsilon");

  std::vector<double> cap(n + 1, 0.0);
  for (int k = 2; k <= n; ++k) cap[k] = (k - 2.0) / k - out.lin.a[k];
  if (out.region == 2) {
    // Here the bottom-level mass is charged to the movable budget; in
    // region 1 it comes off the top atom instead (guarded above).
    cap[n] -= out.d;
    if (cap[n] < -1e-15)
      throw std::invalid_argument(
          "ir_marginals: top-class budget exhausted, reduce epsilon");
    cap[n] = std::max(cap[n], 0.0);
  }

  out.b_ir.assign(n + 1, 0.0);
  out.park.assign(n + 1, 0.0);
  if (out.region == 1) {
    for (int k = 2; k <= n; ++k) out.b_ir[k] = out.lin.b[k];
  } else {
    // The surplus-neutral threshold needs less low-value calibration mass
    // than the optimum; spread it bottom-up and pin the spare mass at 1.
    const double target = 2.0 * prior.lambda[0] * out.t0_ir / (1.0 - out.t0_ir);
    double budget = 0.0;
    for (int k = 2; k <= n; ++k)
      if (prior.lambda[k] > 0.0) budget += prior.lambda[k] * k * cap[k];
    if (target > budget + 1e-12)
      throw std::invalid_argument(
          "ir_marginals: low-threshold budget infeasible for this prior and epsilon");
    double rem = target;
    for (int k = 2; k <= n; ++k) {
      if (prior.lambda[k] <= 0.0) {
        out.park[k] = cap[k];
        continue;
      }
      const double take = std::min(cap[k], rem / (prior.lambda[k] * k));
      out.b_ir[k] = take;
      out.park[k] = cap[k] - take;
      rem -= prior.lambda[k] * k * take;
    }
    if (rem > 1e-9) throw std::runtime_error("ir_marginals: budget allocation failed");
  }

  MarginalFamily& fam = out.fam;
  fam.n = n;
  fam.f1.assign(n + 1, DiscreteDist::point(0.0));
  fam.f0.assign(n + 1, DiscreteDist::point(0.0));

  {
    std::vector<std::pair<double, double>> a1;
    for (int j = 0; j < 2 * M; ++j) a1.emplace_back(out.seq.t[j + 1], out.seq.r[j]);
    fam.f1[1] = DiscreteDist::from_atoms(std::move(a1));
    std::vector<std::pair<double, double>> a0;
    for (int j = 0; j < 2 * M; ++j)
      a0.emplace_back(out.seq.t[j], out.seq.r[j] / (n - 1));
    if (n >= 3) a0.emplace_back(0.0, static_cast<double>(n - 2) / (n - 1));
    fam.f0[1] = DiscreteDist::from_atoms(std::move(a0));
  }
  for (int k = 2; k <= n; ++k) {
    std::vector<std::pair<double, double>> atoms;
    double top = 2.0 / k + out.park[k];
    if (k == n && out.region == 1) top -= out.d;
    atoms.emplace_back(1.0, top);
    if (out.lin.a[k] > 0.0)
      for (int j = 0; j < 2 * M; ++j)
        atoms.emplace_back(out.seq.t[j], out.lin.a[k] * out.seq.r[j]);
    if (out.b_ir[k] > 0.0) atoms.emplace_back(out.t0_ir, out.b_ir[k]);
    if (k == n) atoms.emplace_back(out.seq.t[0], out.d);
    fam.f1[k] = DiscreteDist::from_atoms(std::move(atoms));
    if (k <= n - 1) fam.f0[k] = DiscreteDist::point(0.0);
  }
  {
    std::vector<std::pair<double, double>> a0;
    a0.emplace_back(out.t0_ir, 2.0 / n);
    if (n >= 3) a0.emplace_back(0.0, static_cast<double>(n - 2) / n);
    fam.f0[0] = DiscreteDist::from_atoms(std::move(a0));
  }
  return out;
}

CalibratedSignaling design_ir(const PriorBySum& prior, double eps,
                              ThresholdConvention conv) {
  IrMarginalFamily irm = ir_marginals(prior, eps, conv);
  const int n = prior.n;
  const int M = irm.seq.M;
  if (2.0 * M * std::max(1, n - 1) > 2e6)
    throw std::invalid_argument(
        "design_ir: too many ladder rows to materialize, use the closed-form summary");
  double minsp = 1.0 - irm.seq.t[2 * M - 1];
  for (int j = 0; j + 1 < 2 * M; ++j)
    minsp = std::min(minsp, irm.seq.t[j + 1] - irm.seq.t[j]);
  if (minsp <= 1e-11)
    throw std::invalid_argument(
        "design_ir: ladder levels too close to materialize, use the closed-form summary");

  CalibratedSignaling sig;
  sig.prior = prior;
  sig.family = irm.fam;
  sig.plans.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    sig.plans[k].n = n;
    sig.plans[k].k = k;
  }
  if (prior.lambda[0] > 0.0) sig.plans[0] = plan_for_class(0, irm.fam);
  if (prior.lambda[1] > 0.0) {
    // Staircase: the clicker bids one level above a single loser, so every
    // ladder value is both won against and charged, which is what the
    // weight recursion calibrates.
    TransportPlan plan;
    plan.n = n;
    plan.k = 1;
    plan.rows.reserve(static_cast<size_t>(2 * M) * (n - 1));
    for (int j = 0; j < 2 * M; ++j) {
      for (int rot = 0; rot < n - 1; ++rot) {
        TransportRow row;
        row.bids.assign(n, 0.0);
        row.bids[0] = irm.seq.t[j + 1];
        row.bids[1 + rot] = irm.seq.t[j];
        row.w = irm.seq.r[j] / (n - 1);
        plan.rows.push_back(std::move(row));
      }
    }
    sig.plans[1] = std::move(plan);
  }
  for (int k = 2; k <= n; ++k)
    if (prior.lambda[k] > 0.0) sig.plans[k] = plan_for_class(k, irm.fam);

  sig.meta.variant = "ir";
  sig.meta.convention = irm.th.used;
  sig.meta.t1 = irm.th.t1;
  sig.meta.t0 = irm.th.t0;
  sig.meta.region = irm.region;
  sig.meta.threshold_fallback = irm.th.fallback;
  sig.meta.threshold_flagged = irm.th.flagged;
  sig.meta.has_ir = true;
  sig.meta.epsilon = eps;
  sig.meta.M = M;
  sig.meta.levels = irm.seq.t;
  sig.meta.t0_ir = irm.t0_ir;
  sig.meta.ir_deduction = irm.d;
  return sig;
}

UtilityReport exante_utility(const CalibratedSignaling& sig) {
  const int n = sig.prior.n;
  UtilityReport rep;
  rep.per_class.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    if (sig.prior.lambda[k] <= 0.0) continue;
    if (sig.plans[k].rows.empty())
      throw std::runtime_error("exante_utility: missing plan for a class with positive mass");
    double cls = 0.0;
    for (const auto& row : sig.plans[k].rows) {
      double top = -1.0;
      for (double b : row.bids) top = std::max(top, b);
      int winners = 0;
      double clicking_winners = 0.0;
      for (int i = 0; i < n; ++i) {
        if (row.bids[i] < top - 1e-12) continue;
        ++winners;
        if (i < k) clicking_winners += 1.0;
      }
      cls += row.w * (clicking_winners / winners - secmax_of_row(row.bids));
    }
    rep.per_class[k] = sig.prior.lambda[k] * cls;
    rep.total += rep.per_class[k];
  }
  // Roles rotate uniformly over bidders in the exchangeable scheme, so the
  // canonical-coordinate credits spread evenly.
  rep.per_bidder.assign(n, rep.total / n);
  return rep;
}

IrSummary ir_design_summary(const PriorBySum& prior, double eps, bool enforce_validity) {
  IrSummary s;
  s.epsilon = eps;

  const auto note = [&s](const std::string& msg) {
    if (!s.validity_note.empty()) s.validity_note += "; ";
    s.validity_note += msg;
    s.valid = false;
  };
  const std::string bad = eps_violation(prior, eps);
  if (!bad.empty()) {
    if (enforce_validity) throw std::invalid_argument("ir_design_summary: " + bad);
    note(bad);
  }
  if (!(eps > 0.0) || prior.lambda[1] <= 0.0 || prior.lambda[prior.n] <= 0.0)
    throw std::invalid_argument(
        "ir_design_summary: needs positive epsilon, lambda[1] and lambda[n]");

  const int n = prior.n;
  const LinSysSolution lin = solve_linsys(prior);
  const Thresholds th = optimal_thresholds(prior, lin, ThresholdConvention::appendix);
  const SerratedSequence seq = build_ladder(prior, eps, lin);
  const int M = seq.M;
  s.M = M;
  s.region = region_of(prior, th);
  s.t1 = th.t1;
  s.t0 = th.t0;
  s.welfare = prior.welfare();
  s.rev_full = prior.full_info_revenue();
  double tail = 0.0;
  for (int k = 2; k <= n; ++k) tail += prior.lambda[k];
  s.rev_opt = prior.lambda[0] * th.t0 + prior.lambda[1] * th.t1 + tail;

  double lvl_mean = 0.0, surplus = 0.0;
  for (int j = 0; j < 2 * M; ++j) {
    lvl_mean += seq.r[j] * seq.t[j];
    surplus += seq.r[j] * (1.0 - seq.t[j]);
  }
  const double d = seq.r[0] * (prior.lambda[1] - 0.5 * eps * eps) / (n * prior.lambda[n]);
  if (d > 2.0 / n - 1e-15) note("bottom-level mass exceeds the top atom");

  if (s.region == 1) {
    s.t0_ir = th.t0;
  } else if (prior.lambda[0] > 0.0) {
    s.t0_ir = prior.lambda[1] * surplus / prior.lambda[0];
  }
  if (seq.t[0] <= s.t0_ir + 1e-12) note("ladder reaches the low threshold");

  double deduction = 0.0;
  if (s.region == 1) {
    // The displaced top-class mass pairs greedily below 1: serrated levels
    // from the top, then the bottom-level atom, then the low threshold.
    double residual = 0.5 * n * d;
    for (int j = 2 * M - 1; j >= 0 && residual > 1e-15; --j) {
      double capj = 0.5 * n * lin.a[n] * seq.r[j];
      if (j == 0) capj += 0.5 * n * d;
      const double take = std::min(residual, capj);
      deduction += (1.0 - seq.t[j]) * take;
      residual -= take;
    }
    if (residual > 1e-15) {
      const double take = std::min(residual, 0.5 * n * lin.b[n]);
      deduction += (1.0 - th.t0) * take;
      residual -= take;
    }
  } else {
    std::vector<double> cap(n + 1, 0.0);
    for (int k = 2; k <= n; ++k) cap[k] = (k - 2.0) / k - lin.a[k];
    cap[n] = std::max(cap[n] - d, 0.0);
    double budget = 0.0;
    for (int k = 2; k <= n; ++k)
      if (prior.lambda[k] > 0.0) budget += prior.lambda[k] * k * cap[k];
    const double target = 2.0 * prior.lambda[0] * s.t0_ir / (1.0 - s.t0_ir);
    if (target > budget + 1e-12) note("low-threshold budget infeasible");
  }
  if (enforce_validity && !s.valid)
    throw std::invalid_argument("ir_design_summary: " + s.validity_note);

  s.rev_ir = prior.lambda[0] * s.t0_ir + prior.lambda[1] * lvl_mean + tail;
  if (s.region == 1) s.rev_ir -= prior.lambda[n] * deduction;
  return s;
}

}  // namespace calsig
