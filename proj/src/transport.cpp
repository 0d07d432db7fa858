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

#include "calsig/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "calsig/lp.hpp"
#include "calsig/marginals.hpp"

namespace calsig {

namespace {

constexpr double kWeightEps = 1e-15;
constexpr double kValueTol = 1e-12;

// Remaining mass over a fixed ascending support.
struct MassPool {
  std::vector<double> vals;
  std::vector<double> rem;

  int find(double v) const {
    for (int i = 0; i < static_cast<int>(vals.size()); ++i)
      if (std::abs(vals[i] - v) <= kValueTol) return i;
    return -1;
  }
  void consume(double v, double w) {
    const int i = find(v);
    if (i < 0 || rem[i] < w - 1e-9) throw std::runtime_error("transport: pool underflow");
    rem[i] -= w;
    if (rem[i] < 0.0) rem[i] = 0.0;
  }
  int lowest_nonempty() const {
    for (int i = 0; i < static_cast<int>(vals.size()); ++i)
      if (rem[i] > kWeightEps) return i;
    return -1;
  }
  double total() const {
    double s = 0.0;
    for (double r : rem) s += r;
    return s;
  }
  // Removes `need` mass from the bottom up.
  void consume_lowest(double need) {
    for (size_t i = 0; i < rem.size() && need > kWeightEps; ++i) {
      const double take = std::min(rem[i], need);
      rem[i] -= take;
      need -= take;
    }
  }
};

// Read-only ascending view with positional lookup, used to hand several
// filler slots consistent segments of the same pool.
struct Stream {
  std::vector<double> vals;
  std::vector<double> cum;  // cum[i] = mass strictly before atom i
  double total = 0.0;

  explicit Stream(const MassPool& p) {
    double acc = 0.0;
    for (size_t i = 0; i < p.vals.size(); ++i) {
      if (p.rem[i] <= kWeightEps) continue;
      vals.push_back(p.vals[i]);
      cum.push_back(acc);
      acc += p.rem[i];
    }
    total = acc;
  }
  double value_at(double pos) const {
    for (int i = static_cast<int>(vals.size()) - 1; i >= 0; --i)
      if (pos >= cum[i] - 1e-13) return vals[i];
    if (vals.empty()) throw std::runtime_error("transport: empty filler stream");
    return vals.front();
  }
  // Distance from pos to the next atom boundary above it.
  double gap_to_boundary(double pos) const {
    for (size_t i = 0; i < vals.size(); ++i) {
      const double end = i + 1 < vals.size() ? cum[i + 1] : total;
      if (end > pos + 1e-13) return end - pos;
    }
    return 1e300;
  }
};

struct PairEvent {
  double value = 0.0;
  int cls = 0;  // 1 = clicking side, 0 = losing side
  double weight = 0.0;
};

}  // namespace

double secmax_of_row(const std::vector<double>& bids) {
  double m1 = -1.0, m2 = -1.0;
  for (double b : bids) {
    if (b > m1) {
      m2 = m1;
      m1 = b;
    } else if (b > m2) {
      m2 = b;
    }
  }
  return m2;
}

PlanCheck check_plan_feasible(const TransportPlan& plan, const DiscreteDist* f1,
                              const DiscreteDist* f0, double tol) {
  PlanCheck out;
  const int n = plan.n, k = plan.k;
  double wsum = 0.0;
  for (const auto& r : plan.rows) {
    if (static_cast<int>(r.bids.size()) != n) {
      out.note = "row arity mismatch";
      return out;
    }
    if (r.w < -tol) {
      out.note = "negative row weight";
      return out;
    }
    wsum += r.w;
  }
  out.weight_sum = wsum;
  if (std::abs(wsum - 1.0) > tol) {
    out.note = "weights do not sum to 1";
    return out;
  }

  for (int i = 0; i < n; ++i) {
    const DiscreteDist* want = i < k ? f1 : f0;
    if (want == nullptr) {
      out.note = "missing reference marginal";
      return out;
    }
    std::vector<double> values = want->xs;
    for (const auto& r : plan.rows) values.push_back(r.bids[i]);
    values = cluster_values(std::move(values), kValueTol);
    for (double v : values) {
      double got = 0.0;
      for (const auto& r : plan.rows)
        if (std::abs(r.bids[i] - v) <= kValueTol) got += r.w;
      const double dev = std::abs(got - want->mass_at(v));
      out.worst_marginal_dev = std::max(out.worst_marginal_dev, dev);
    }
  }
  out.ok = out.worst_marginal_dev <= tol;
  if (!out.ok) out.note = "marginal deviation above tolerance";
  return out;
}

TransportPlan correlate_general(int k, const DiscreteDist* f1, const DiscreteDist* f0,
                                int n) {
  if (n < 2 || k < 0 || k > n) throw std::invalid_argument("correlate_general: bad k/n");
  if (k == 1 || k == n - 1)
    throw std::invalid_argument(
        "correlate_general: class sides of size 1 cannot pair internally");
  if (k > 0 && (f1 == nullptr || f1->size() == 0))
    throw std::invalid_argument("correlate_general: f1 required");
  if (k < n && (f0 == nullptr || f0->size() == 0))
    throw std::invalid_argument("correlate_general: f0 required");

  // Pair events from the top down: full capacity (k f1 + (n-k) f0)/2 at each
  // value until the cumulative reaches 1; the boundary value takes the
  // residual, clicking side first.
  std::vector<double> support;
  if (k > 0) support.insert(support.end(), f1->xs.begin(), f1->xs.end());
  if (k < n) support.insert(support.end(), f0->xs.begin(), f0->xs.end());
  support = cluster_values(std::move(support), kValueTol);

  std::vector<PairEvent> events;
  double cum = 0.0;
  for (int i = static_cast<int>(support.size()) - 1; i >= 0 && cum < 1.0 - 1e-12; --i) {
    const double v = support[i];
    const double c1 = k > 0 ? 0.5 * k * f1->mass_at(v) : 0.0;
    const double c0 = k < n ? 0.5 * (n - k) * f0->mass_at(v) : 0.0;
    const double residual = 1.0 - cum;
    const double w1 = std::min(residual, c1);
    const double w0 = std::min(residual - w1, c0);
    if (w1 > kWeightEps) events.push_back({v, 1, w1});
    if (w0 > kWeightEps) events.push_back({v, 0, w0});
    cum += w1 + w0;
  }
  if (cum < 1.0 - 1e-9)
    throw std::runtime_error("correlate_general: pair capacity below 1");

  std::vector<MassPool> pool(n);
  for (int i = 0; i < n; ++i) {
    const DiscreteDist* d = i < k ? f1 : f0;
    pool[i].vals = d->xs;
    pool[i].rem = d->ps;
  }

  TransportPlan plan;
  plan.n = n;
  plan.k = k;

  for (const auto& ev : events) {
    const int lo = ev.cls == 1 ? 0 : k;
    const int hi = ev.cls == 1 ? k : n;
    const int m = hi - lo;
    std::vector<std::tuple<int, int, double>> pairs;
    if (m == 2) {
      pairs.emplace_back(lo, lo + 1, ev.weight);
    } else {
      for (int j = 0; j < m; ++j)
        pairs.emplace_back(lo + j, lo + (j + 1) % m, ev.weight / m);
    }
    for (const auto& [i, j, wp0] : pairs) {
      pool[i].consume(ev.value, wp0);
      pool[j].consume(ev.value, wp0);
      double wp = wp0;
      while (wp > kWeightEps) {
        TransportRow row;
        row.bids.assign(n, 0.0);
        row.bids[i] = ev.value;
        row.bids[j] = ev.value;
        double delta = wp;
        std::vector<int> slot(n, -1);
        for (int l = 0; l < n; ++l) {
          if (l == i || l == j) continue;
          const int a = pool[l].lowest_nonempty();
          if (a < 0) throw std::runtime_error("correlate_general: filler exhausted");
          slot[l] = a;
          row.bids[l] = pool[l].vals[a];
          delta = std::min(delta, pool[l].rem[a]);
        }
        for (int l = 0; l < n; ++l)
          if (slot[l] >= 0) {
            pool[l].rem[slot[l]] -= delta;
            if (pool[l].rem[slot[l]] < 0.0) pool[l].rem[slot[l]] = 0.0;
          }
        row.w = delta;
        plan.rows.push_back(std::move(row));
        wp -= delta;
      }
    }
  }

  double leftover = 0.0;
  for (const auto& p : pool) leftover += p.total();
  if (leftover > 1e-9)
    throw std::runtime_error("correlate_general: unconsumed marginal mass");

  const double bound = secmax_upper_bound(k, f1, f0, n);
  const double got = induced_secmax(plan).mean();
  if (std::abs(got - bound) > 1e-9)
    throw std::runtime_error("correlate_general: value misses the pairing bound");
  return plan;
}

DiscreteDist induced_secmax(const TransportPlan& plan) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(plan.rows.size());
  for (const auto& r : plan.rows) atoms.emplace_back(secmax_of_row(r.bids), r.w);
  return DiscreteDist::from_atoms(std::move(atoms));
}

double secmax_upper_bound(int k, const DiscreteDist* f1, const DiscreteDist* f0, int n) {
  const double t = min_secmax(k, f1, f0, n);
  double bound = t;
  std::vector<double> support;
  if (k > 0) support.insert(support.end(), f1->xs.begin(), f1->xs.end());
  if (k < n) support.insert(support.end(), f0->xs.begin(), f0->xs.end());
  support = cluster_values(std::move(support), kValueTol);
  for (double v : support) {
    if (v <= t + kValueTol) continue;
    double avail = 0.0;
    if (k > 0) avail += k * f1->mass_at(v);
    if (k < n) avail += (n - k) * f0->mass_at(v);
    bound += (v - t) * 0.5 * avail;
  }
  return bound;
}

K1Solution correlate_k1_lp(const DiscreteDist& f11, const DiscreteDist& f10, int n) {
  if (n < 2) throw std::invalid_argument("correlate_k1_lp: need n >= 2");

  // The grid is the full support product. A worst-row floor such as
  // min_secmax(1, ...) must not prune it: the mean-optimal coupling may
  // price some rows below that floor so that expensive losing bids can
  // pair with each other instead of capping at a cheap clicker.
  const std::vector<double>& xs = f11.xs;
  const std::vector<double>& ys = f10.xs;
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  const bool use_h = n >= 3;

  // Variables: m(x, y) row-major over xs * ys, then h(y).
  LpProblem lp;
  lp.num_vars = nx * ny + (use_h ? ny : 0);
  lp.objective.assign(lp.num_vars, 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) lp.objective[i * ny + j] = std::min(xs[i], ys[j]);
  if (use_h)
    for (int j = 0; j < ny; ++j) lp.objective[nx * ny + j] = ys[j];

  LpProblem::Row total;
  for (int v = 0; v < lp.num_vars; ++v) total.coeffs.emplace_back(v, 1.0);
  total.rhs = 1.0;
  lp.eq.push_back(std::move(total));

  for (int i = 0; i < nx; ++i) {
    LpProblem::Row cap;
    for (int j = 0; j < ny; ++j) cap.coeffs.emplace_back(i * ny + j, 1.0);
    cap.rhs = f11.mass_at(xs[i]);
    lp.ub.push_back(std::move(cap));
  }
  for (int j = 0; j < ny; ++j) {
    LpProblem::Row cap;
    for (int i = 0; i < nx; ++i) cap.coeffs.emplace_back(i * ny + j, 1.0);
    if (use_h) cap.coeffs.emplace_back(nx * ny + j, 2.0);
    cap.rhs = (n - 1) * f10.mass_at(ys[j]);
    lp.ub.push_back(std::move(cap));
  }

  const LpSolution ls = solve_lp(lp);
  if (ls.status != LpSolution::Status::optimal)
    throw std::runtime_error("correlate_k1_lp: coupling program infeasible");

  K1Solution sol;
  sol.value = ls.value;
  std::vector<std::tuple<double, double, double>> raw_m;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (ls.x[i * ny + j] > 1e-12) raw_m.emplace_back(xs[i], ys[j], ls.x[i * ny + j]);
  if (use_h)
    for (int j = 0; j < ny; ++j)
      if (ls.x[nx * ny + j] > 1e-12) sol.h.emplace_back(ys[j], ls.x[nx * ny + j]);

  // Monotone rearrangement: recouple the m-marginals comonotonically. The
  // value is unchanged at an optimum, which is asserted rather than assumed.
  std::map<double, double> mx, my;
  double old_val = 0.0;
  for (const auto& [x, y, w] : raw_m) {
    mx[x] += w;
    my[y] += w;
    old_val += std::min(x, y) * w;
  }
  auto ix = mx.begin();
  auto iy = my.begin();
  double rx = ix == mx.end() ? 0.0 : ix->second;
  double ry = iy == my.end() ? 0.0 : iy->second;
  double new_val = 0.0;
  while (ix != mx.end() && iy != my.end()) {
    const double d = std::min(rx, ry);
    if (d > kWeightEps) {
      sol.m.emplace_back(ix->first, iy->first, d);
      new_val += std::min(ix->first, iy->first) * d;
    }
    rx -= d;
    ry -= d;
    if (rx <= kWeightEps) {
      if (++ix != mx.end()) rx = ix->second;
    }
    if (ry <= kWeightEps) {
      if (++iy != my.end()) ry = iy->second;
    }
  }
  if (std::abs(new_val - old_val) > 1e-9)
    throw std::runtime_error("correlate_k1_lp: rearrangement changed the value");
  return sol;
}

TransportPlan plan_from_k1(const K1Solution& sol, const DiscreteDist& f11,
                           const DiscreteDist& f10, int n) {
  if (n < 2) throw std::invalid_argument("plan_from_k1: need n >= 2");
  if (n == 2 && !sol.h.empty())
    throw std::invalid_argument("plan_from_k1: h rows impossible with one loser");

  MassPool pool;  // aggregate losing-side mass, (n-1) * f10
  pool.vals = f10.xs;
  pool.rem = f10.ps;
  for (double& r : pool.rem) r *= (n - 1);
  MassPool b1;
  b1.vals = f11.xs;
  b1.rem = f11.ps;

  // Reserve every role bid first so fillers can never starve a later row's
  // paired value: m rows take (x, y), h rows take (y, y) plus a clicker
  // filler drawn from whatever f11 mass the m rows leave behind.
  for (const auto& [x, y, w] : sol.m) {
    b1.consume(x, w);
    pool.consume(y, w);
  }
  for (const auto& [y, w] : sol.h) pool.consume(y, 2.0 * w);

  struct Entry {
    bool is_m;
    double x, y, w, sec;
  };
  std::vector<Entry> entries;
  for (const auto& [x, y, w] : sol.m) entries.push_back({true, x, y, w, std::min(x, y)});
  for (const auto& [y, w] : sol.h) entries.push_back({false, 0.0, y, w, y});
  // Ascending by intended second-highest bid: low rows claim low fillers.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.sec != b.sec) return a.sec < b.sec;
    return a.is_m < b.is_m;
  });

  struct RoleRow {
    double b1_bid = 0.0;
    std::vector<double> zeros;  // role value(s) first, fillers after
    double w = 0.0;
  };
  std::vector<RoleRow> role_rows;

  for (const auto& e : entries) {
    const int nslots = e.is_m ? n - 2 : n - 3;
    const Stream zs(pool);
    const Stream bs(b1);
    if (zs.total < nslots * e.w - 1e-9)
      throw std::runtime_error("plan_from_k1: loser pool exhausted");
    if (!e.is_m && bs.total < e.w - 1e-9)
      throw std::runtime_error("plan_from_k1: clicker pool exhausted");

    // Slot s reads stream positions [s*w, (s+1)*w); rows split wherever any
    // slot crosses an atom boundary so each row has a single value per slot.
    double p = 0.0;
    while (p < e.w - kWeightEps) {
      double delta = e.w - p;
      for (int s = 0; s < nslots; ++s)
        delta = std::min(delta, zs.gap_to_boundary(s * e.w + p));
      if (!e.is_m) delta = std::min(delta, bs.gap_to_boundary(p));
      if (delta < 1e-14) delta = std::min(e.w - p, 1e-14);

      RoleRow rr;
      rr.w = delta;
      if (e.is_m) {
        rr.b1_bid = e.x;
        rr.zeros.push_back(e.y);
      } else {
        rr.b1_bid = bs.value_at(p);
        rr.zeros.push_back(e.y);
        rr.zeros.push_back(e.y);
      }
      for (int s = 0; s < nslots; ++s) {
        const double v = zs.value_at(s * e.w + p);
        if (v > e.sec + kValueTol)
          throw std::runtime_error("plan_from_k1: filler above pair value");
        rr.zeros.push_back(v);
      }
      role_rows.push_back(std::move(rr));
      p += delta;
    }
    pool.consume_lowest(nslots * e.w);
    if (!e.is_m) b1.consume_lowest(e.w);
  }

  if (pool.total() > 1e-9 || b1.total() > 1e-9)
    throw std::runtime_error("plan_from_k1: unconsumed marginal mass");

  // Rotate the losing-coordinate assignment so every coordinate averages f10.
  TransportPlan plan;
  plan.n = n;
  plan.k = 1;
  for (const auto& rr : role_rows) {
    for (int r = 0; r < n - 1; ++r) {
      TransportRow row;
      row.bids.assign(n, 0.0);
      row.bids[0] = rr.b1_bid;
      for (int j = 0; j < n - 1; ++j) row.bids[1 + j] = rr.zeros[(j + r) % (n - 1)];
      row.w = rr.w / (n - 1);
      plan.rows.push_back(std::move(row));
    }
  }
  return plan;
}

K1Decomposition k1_decompose(const TransportPlan& plan) {
  if (plan.k != 1) throw std::invalid_argument("k1_decompose: class-1 plan required");
  K1Decomposition d;
  for (const auto& r : plan.rows) {
    const double b1 = r.bids[0];
    double z1 = -1.0, z2 = -1.0;
    for (int i = 1; i < plan.n; ++i) {
      const double b = r.bids[i];
      if (b > z1) {
        z2 = z1;
        z1 = b;
      } else if (b > z2) {
        z2 = b;
      }
    }
    if (b1 >= z2 - kValueTol) {
      // Bidder 1 is in the top two; the partner is the best losing bid.
      d.m[{b1, z1}] += r.w;
    } else {
      d.h[z2] += r.w;
    }
  }
  return d;
}

}  // namespace calsig
