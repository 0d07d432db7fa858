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

#include "calsig/signaling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace calsig {

namespace {

constexpr double kValueTol = 1e-12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TransportPlan plan_for_class(int k, const MarginalFamily& fam) {
  const int n = fam.n;
  if (k < 0 || k > n) throw std::invalid_argument("plan_for_class: bad click count");
  if (k == 1) {
    const K1Solution sol = correlate_k1_lp(fam.f1[1], fam.f0[1], n);
    return plan_from_k1(sol, fam.f1[1], fam.f0[1], n);
  }
  if (k == n - 1 && k >= 2) {
    // One loser: pin them at 0 and pair the clicking side among itself.
    if (std::abs(fam.f0[k].mass_at(0.0) - 1.0) > 1e-9)
      throw std::invalid_argument(
          "plan_for_class: a lone losing bidder must hold a point mass at 0");
    TransportPlan inner = correlate_general(n - 1, &fam.f1[k], nullptr, n - 1);
    TransportPlan plan;
    plan.n = n;
    plan.k = k;
    plan.rows.reserve(inner.rows.size());
    for (auto& r : inner.rows) {
      TransportRow row;
      row.bids = std::move(r.bids);
      row.bids.push_back(0.0);
      row.w = r.w;
      plan.rows.push_back(std::move(row));
    }
    return plan;
  }
  return correlate_general(k, k > 0 ? &fam.f1[k] : nullptr,
                           k < n ? &fam.f0[k] : nullptr, n);
}

CalibratedSignaling design_optimal(const PriorBySum& prior, ThresholdConvention conv) {
  const LinSysSolution lin = solve_linsys(prior);
  const Thresholds th = optimal_thresholds(prior, lin, conv);

  CalibratedSignaling sig;
  sig.prior = prior;
  sig.family = optimal_marginals(prior, lin, th);
  sig.plans.resize(prior.n + 1);
  for (int k = 0; k <= prior.n; ++k) {
    sig.plans[k].n = prior.n;
    sig.plans[k].k = k;
    if (prior.lambda[k] <= 0.0) continue;
    sig.plans[k] = plan_for_class(k, sig.family);
  }
  sig.meta.variant = "optimal";
  sig.meta.convention = th.used;
  sig.meta.t1 = th.t1;
  sig.meta.t0 = th.t0;
  sig.meta.region = region_of(prior, th);
  sig.meta.threshold_fallback = th.fallback;
  sig.meta.threshold_flagged = th.flagged;
  return sig;
}

CalibratedSignaling full_information(const PriorBySum& prior) {
  const int n = prior.n;
  CalibratedSignaling sig;
  sig.prior = prior;
  sig.family.n = n;
  sig.family.f1.assign(n + 1, DiscreteDist::point(1.0));
  sig.family.f0.assign(n + 1, DiscreteDist::point(0.0));
  sig.plans.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    TransportRow row;
    row.bids.assign(n, 0.0);
    for (int i = 0; i < k; ++i) row.bids[i] = 1.0;
    row.w = 1.0;
    sig.plans[k].n = n;
    sig.plans[k].k = k;
    sig.plans[k].rows.push_back(std::move(row));
  }
  sig.meta.variant = "full_information";
  return sig;
}

double revenue(const CalibratedSignaling& sig) {
  double rev = 0.0;
  for (int k = 0; k <= sig.prior.n; ++k) {
    if (sig.prior.lambda[k] <= 0.0) continue;
    if (sig.plans[k].rows.empty())
      throw std::invalid_argument("revenue: missing plan for a class with positive mass");
    rev += sig.prior.lambda[k] * induced_secmax(sig.plans[k]).mean();
  }
  return rev;
}

DiscreteDist conditional_secmax(const CalibratedSignaling& sig, int k) {
  if (k < 0 || k > sig.prior.n)
    throw std::invalid_argument("conditional_secmax: bad click count");
  if (sig.plans[k].rows.empty()) {
    if (sig.prior.lambda[k] <= 0.0) return DiscreteDist::point(0.0);
    throw std::invalid_argument("conditional_secmax: missing plan");
  }
  return induced_secmax(sig.plans[k]);
}

SignalCalibration verify_calibration(const CalibratedSignaling& sig, double tol) {
  const int n = sig.prior.n;
  std::vector<double> values;
  for (int k = 0; k <= n; ++k) {
    if (sig.prior.lambda[k] <= 0.0) continue;
    if (sig.plans[k].rows.empty())
      throw std::invalid_argument("verify_calibration: missing plan");
    for (const auto& r : sig.plans[k].rows)
      values.insert(values.end(), r.bids.begin(), r.bids.end());
  }
  values = cluster_values(std::move(values), kValueTol);

  SignalCalibration out;
  out.calibrated = true;
  for (double v : values) {
    double imp = 0.0, clk = 0.0;
    for (int k = 0; k <= n; ++k) {
      if (sig.prior.lambda[k] <= 0.0) continue;
      for (const auto& r : sig.plans[k].rows) {
        const double wl = sig.prior.lambda[k] * r.w;
        for (int i = 0; i < n; ++i) {
          if (std::abs(r.bids[i] - v) > kValueTol) continue;
          imp += wl;
          if (i < k) clk += wl;
        }
      }
    }
    if (imp <= 1e-15) continue;
    const double dev = std::abs(clk / imp - v);
    out.rows.push_back({v, imp, clk});
    if (dev > out.worst_dev) {
      out.worst_dev = dev;
      out.worst_value = v;
    }
  }
  out.calibrated = out.worst_dev <= tol;
  return out;
}

double raw_revenue(const RawSignaling& raw, const PriorBySum& prior) {
  if (raw.n != prior.n) throw std::invalid_argument("raw_revenue: size mismatch");
  if (raw.n > 20) throw std::invalid_argument("raw_revenue: too many bidders");
  double rev = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << raw.n); ++mask) {
    const int k = std::popcount(mask);
    const double pr = prior.profile_prob(k);
    if (pr <= 0.0) continue;
    const auto it = raw.rows.find(mask);
    if (it == raw.rows.end())
      throw std::invalid_argument("raw_revenue: missing rows for a likely outcome");
    double wsum = 0.0;
    for (const auto& r : it->second) {
      if (static_cast<int>(r.bids.size()) != raw.n)
        throw std::invalid_argument("raw_revenue: row arity mismatch");
      wsum += r.w;
      rev += pr * r.w * secmax_of_row(r.bids);
    }
    if (std::abs(wsum - 1.0) > 1e-9)
      throw std::invalid_argument("raw_revenue: conditional weights must sum to 1");
  }
  return rev;
}

CalibratedSignaling symmetrize(const RawSignaling& raw, const PriorBySum& prior) {
  const int n = prior.n;
  if (raw.n != n) throw std::invalid_argument("symmetrize: size mismatch");
  if (n > 10) throw std::invalid_argument("symmetrize: supports up to 10 bidders");
  const double nfact = factorial(n);

  CalibratedSignaling sig;
  sig.prior = prior;
  sig.family.n = n;
  sig.family.f1.assign(n + 1, DiscreteDist::point(0.0));
  sig.family.f0.assign(n + 1, DiscreteDist::point(0.0));
  sig.plans.resize(n + 1);

  for (int k = 0; k <= n; ++k) {
    sig.plans[k].n = n;
    sig.plans[k].k = k;
    if (prior.lambda[k] <= 0.0) continue;

    // Average over relabelings: bidder i of the canonical profile plays the
    // role of raw bidder p[i], so outcome bit p[i] is set iff i < k and the
    // canonical bid vector reads y[i] = b[p[i]].
    std::map<std::vector<double>, double> acc;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      std::uint32_t mask = 0;
      for (int i = 0; i < k; ++i) mask |= 1u << p[i];
      const auto it = raw.rows.find(mask);
      if (it == raw.rows.end())
        throw std::invalid_argument("symmetrize: missing rows for a likely outcome");
      double wsum = 0.0;
      for (const auto& r : it->second) {
        if (static_cast<int>(r.bids.size()) != n)
          throw std::invalid_argument("symmetrize: row arity mismatch");
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
          y[i] = r.bids[p[i]];
          if (y[i] < -1e-12 || y[i] > 1.0 + 1e-12)
            throw std::invalid_argument("symmetrize: bids must lie in [0, 1]");
        }
        acc[y] += r.w / nfact;
        wsum += r.w;
      }
      if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("symmetrize: conditional weights must sum to 1");
    } while (std::next_permutation(p.begin(), p.end()));

    for (auto& [bids, w] : acc) {
      if (w <= 1e-15) continue;
      sig.plans[k].rows.push_back({bids, w});
    }

    std::vector<std::pair<double, double>> a1, a0;
    for (const auto& r : sig.plans[k].rows)
      for (int i = 0; i < n; ++i)
        (i < k ? a1 : a0).emplace_back(r.bids[i], r.w / (i < k ? k : n - k));
    if (k >= 1) sig.family.f1[k] = DiscreteDist::from_atoms(std::move(a1));
    if (k <= n - 1) sig.family.f0[k] = DiscreteDist::from_atoms(std::move(a0));
  }

  sig.meta.variant = "symmetrized";
  return sig;
}

}  // namespace calsig
