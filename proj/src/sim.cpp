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

#include "calsig/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "calsig/rng.hpp"
#include "calsig/transport.hpp"

namespace calsig {

namespace {

struct ShardAccum {
  double rev_sum = 0.0;
  double rev_sumsq = 0.0;
  std::vector<double> util_sum;
  std::vector<double> util_sumsq;
  std::map<double, std::pair<long long, long long>> cal;  // value -> (imp, clk)
};

int worker_count(int shards) {
  int threads = 0;
  if (const char* env = std::getenv("CALSIG_THREADS")) {
    threads = std::atoi(env);
  }
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  return std::min(threads, shards);
}

}  // namespace

SimReport simulate(const CalibratedSignaling& sig, const SimOptions& opt) {
  const int n = sig.prior.n;
  if (opt.samples <= 0) throw std::invalid_argument("simulate: samples must be positive");

  std::vector<double> cum_lambda(n + 1, 0.0);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += sig.prior.lambda[k];
    cum_lambda[k] = acc;
  }
  std::vector<std::vector<double>> cum_rows(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (sig.prior.lambda[k] <= 0.0) continue;
    if (sig.plans[k].rows.empty())
      throw std::runtime_error("simulate: missing plan for a class with positive mass");
    double w = 0.0;
    for (const auto& r : sig.plans[k].rows) {
      w += r.w;
      cum_rows[k].push_back(w);
    }
  }

  const int shards = 16;
  std::vector<ShardAccum> accums(shards);
  for (auto& a : accums) {
    a.util_sum.assign(n, 0.0);
    a.util_sumsq.assign(n, 0.0);
  }

  const long long total = opt.samples;
  auto run_shard = [&](int s) {
    ShardAccum& a = accums[s];
    const long long lo = total * s / shards;
    const long long hi = total * (s + 1) / shards;
    std::vector<int> perm(n);
    for (long long idx = lo; idx < hi; ++idx) {
      const SampleRng rng(opt.seed, static_cast<std::uint64_t>(idx));

      const double u0 = rng.u(0);
      int k = n;
      for (int c = 0; c <= n; ++c) {
        if (u0 < cum_lambda[c]) {
          k = c;
          break;
        }
      }
      while (sig.prior.lambda[k] <= 0.0 && k > 0) --k;  // fp edge at bucket seams

      const auto& rows = sig.plans[k].rows;
      const auto& cum = cum_rows[k];
      const double target = rng.u(1) * cum.back();
      const size_t ri =
          std::lower_bound(cum.begin(), cum.end(), target) - cum.begin();
      const auto& row = rows[std::min(ri, rows.size() - 1)];

      std::iota(perm.begin(), perm.end(), 0);
      for (int i = n - 1; i >= 1; --i) {
        const double u = rng.u(static_cast<std::uint32_t>(2 + (n - 1 - i)));
        int j = static_cast<int>(u * (i + 1));
        if (j > i) j = i;
        std::swap(perm[i], perm[j]);
      }

      const double sec = secmax_of_row(row.bids);
      a.rev_sum += sec;
      a.rev_sumsq += sec * sec;

      double top = -1.0;
      for (double b : row.bids) top = std::max(top, b);
      int winners = 0;
      for (int c = 0; c < n; ++c)
        if (row.bids[c] >= top - 1e-12) ++winners;
      const double ut = rng.u(static_cast<std::uint32_t>(n + 1));
      int pick = std::min(static_cast<int>(ut * winners), winners - 1);
      int win_coord = -1;
      for (int c = 0; c < n; ++c) {
        if (row.bids[c] < top - 1e-12) continue;
        if (pick-- == 0) {
          win_coord = c;
          break;
        }
      }
      const double surplus = (win_coord < k ? 1.0 : 0.0) - sec;
      a.util_sum[perm[win_coord]] += surplus;
      a.util_sumsq[perm[win_coord]] += surplus * surplus;

      for (int c = 0; c < n; ++c) {
        auto& cell = a.cal[row.bids[c]];
        ++cell.first;
        if (c < k) ++cell.second;
      }
    }
  };

  const int threads = worker_count(shards);
  if (threads <= 1) {
    for (int s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += threads) run_shard(s);
      });
    for (auto& t : pool) t.join();
  }

  SimReport rep;
  rep.samples = total;
  rep.seed = opt.seed;
  rep.shards = shards;
  double rsum = 0.0, rsq = 0.0;
  std::vector<double> usum(n, 0.0), usq(n, 0.0);
  std::map<double, std::pair<long long, long long>> cal;
  for (int s = 0; s < shards; ++s) {
    rsum += accums[s].rev_sum;
    rsq += accums[s].rev_sumsq;
    for (int i = 0; i < n; ++i) {
      usum[i] += accums[s].util_sum[i];
      usq[i] += accums[s].util_sumsq[i];
    }
    for (const auto& [v, c] : accums[s].cal) {
      auto& cell = cal[v];
      cell.first += c.first;
      cell.second += c.second;
    }
  }

  const double N = static_cast<double>(total);
  rep.revenue_mean = rsum / N;
  if (total > 1) {
    const double var = std::max(0.0, (rsq - N * rep.revenue_mean * rep.revenue_mean) / (N - 1.0));
    rep.revenue_stderr = std::sqrt(var / N);
  }
  rep.utility_mean.assign(n, 0.0);
  rep.utility_stderr.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    rep.utility_mean[i] = usum[i] / N;
    if (total > 1) {
      const double var =
          std::max(0.0, (usq[i] - N * rep.utility_mean[i] * rep.utility_mean[i]) / (N - 1.0));
      rep.utility_stderr[i] = std::sqrt(var / N);
    }
  }
  for (const auto& [v, c] : cal) rep.calibration.push_back({v, c.first, c.second});
  return rep;
}

}  // namespace calsig
