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

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "calsig/ir.hpp"
#include "calsig/prior.hpp"
#include "calsig/signaling.hpp"
#include "calsig/sim.hpp"
#include "doctest.h"

using namespace calsig;

namespace {

PriorBySum stock_prior3() {
  return PriorBySum::from_lambdas(3, {0.1, 0.4, 0.4, 0.1});
}

bool same_report(const SimReport& a, const SimReport& b) {
  if (a.samples != b.samples || a.seed != b.seed || a.shards != b.shards)
    return false;
  if (a.revenue_mean != b.revenue_mean || a.revenue_stderr != b.revenue_stderr)
    return false;
  if (a.calibration.size() != b.calibration.size()) return false;
  for (size_t i = 0; i < a.calibration.size(); ++i) {
    if (a.calibration[i].value != b.calibration[i].value) return false;
    if (a.calibration[i].impressions != b.calibration[i].impressions)
      return false;
    if (a.calibration[i].clicks != b.calibration[i].clicks) return false;
  }
  if (a.utility_mean != b.utility_mean) return false;
  if (a.utility_stderr != b.utility_stderr) return false;
  return true;
}

long long total_impressions(const SimReport& rep) {
  long long total = 0;
  for (const auto& row : rep.calibration) total += row.impressions;
  return total;
}

}  // namespace

TEST_CASE("simulated revenue brackets the analytic optimum") {
  auto sig = design_optimal(stock_prior3());
  SimOptions opt;
  opt.samples = 1000000;
  opt.seed = 1;
  auto rep = simulate(sig, opt);
  CHECK(rep.revenue_stderr > 0.0);
  CHECK(std::abs(rep.revenue_mean - revenue(sig)) <=
        4.0 * rep.revenue_stderr);
  CHECK(total_impressions(rep) == opt.samples * 3);
}

TEST_CASE("empirical click rates track the signal values") {
  auto prior = PriorBySum::from_lambdas(2, {0.25, 0.5, 0.25});
  auto sig = design_optimal(prior);
  SimOptions opt;
  opt.samples = 200000;
  opt.seed = 2;
  auto rep = simulate(sig, opt);
  CHECK(total_impressions(rep) == opt.samples * 2);
  bool found = false;
  for (const auto& row : rep.calibration) {
    if (std::abs(row.value - 0.5) > 1e-9) continue;
    found = true;
    CHECK(row.impressions >= 1000);
    double rate = static_cast<double>(row.clicks) / row.impressions;
    CHECK(std::abs(rate - 0.5) < 0.01);
  }
  CHECK(found);
}

TEST_CASE("identical seeds reproduce the full report bit for bit") {
  auto sig = design_optimal(stock_prior3());
  SimOptions opt;
  opt.samples = 200000;
  opt.seed = 99;
  auto a = simulate(sig, opt);
  auto b = simulate(sig, opt);
  CHECK(same_report(a, b));

  SimOptions other = opt;
  other.seed = 100;
  auto c = simulate(sig, other);
  CHECK(a.revenue_mean != c.revenue_mean);
}

TEST_CASE("worker count does not affect the merged report") {
  auto sig = design_optimal(stock_prior3());
  SimOptions opt;
  opt.samples = 200000;
  opt.seed = 7;
  setenv("CALSIG_THREADS", "3", 1);
  auto a = simulate(sig, opt);
  setenv("CALSIG_THREADS", "1", 1);
  auto b = simulate(sig, opt);
  unsetenv("CALSIG_THREADS");
  CHECK(same_report(a, b));
}

TEST_CASE("single-sample runs degenerate cleanly") {
  auto sig = design_optimal(stock_prior3());
  SimOptions opt;
  opt.samples = 1;
  opt.seed = 3;
  auto rep = simulate(sig, opt);
  CHECK(rep.samples == 1);
  CHECK(rep.revenue_stderr == 0.0);
  CHECK(total_impressions(rep) == 3);

  SimOptions bad;
  bad.samples = 0;
  CHECK_THROWS_AS((void)simulate(sig, bad), std::invalid_argument);
}

TEST_CASE("simulated per-bidder surplus matches the design accounting") {
  auto sig = design_ir(stock_prior3(), 0.1);
  SimOptions opt;
  opt.samples = 1000000;
  opt.seed = 11;
  auto rep = simulate(sig, opt);
  auto util = exante_utility(sig);
  REQUIRE(rep.utility_mean.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rep.utility_stderr[i] > 0.0);
    CHECK(std::abs(rep.utility_mean[i] - util.per_bidder[i]) <=
          4.0 * rep.utility_stderr[i]);
  }
  CHECK(std::abs(rep.revenue_mean - revenue(sig)) <=
        4.0 * rep.revenue_stderr);
}

TEST_CASE("full information simulates to its closed-form revenue") {
  auto sig = full_information(stock_prior3());
  SimOptions opt;
  opt.samples = 300000;
  opt.seed = 4;
  auto rep = simulate(sig, opt);
  CHECK(std::abs(rep.revenue_mean - 0.5) <= 4.0 * rep.revenue_stderr);
}
