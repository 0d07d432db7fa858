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

#include "calsig/json_io.hpp"

#include <stdexcept>

namespace calsig {

using nlohmann::ordered_json;

namespace {

constexpr const char* kFormatTag = "calsig-signaling-v1";

std::string convention_name(ThresholdConvention c) {
  return c == ThresholdConvention::appendix ? "appendix" : "main_text";
}

ThresholdConvention convention_from(const std::string& s) {
  if (s == "appendix") return ThresholdConvention::appendix;
  if (s == "main_text") return ThresholdConvention::main_text;
  throw std::invalid_argument("unknown threshold convention: " + s);
}

}  // namespace

ordered_json prior_to_json(const PriorBySum& prior) {
  return ordered_json{{"n", prior.n}, {"lambda", prior.lambda}};
}

PriorBySum prior_from_json(const ordered_json& j) {
  if (j.contains("bernoulli")) {
    const auto& b = j.at("bernoulli");
    return PriorBySum::from_bernoulli(b.at("n").get<int>(), b.at("p").get<double>());
  }
  return PriorBySum::from_lambdas(j.at("n").get<int>(),
                                  j.at("lambda").get<std::vector<double>>());
}

ordered_json dist_to_json(const DiscreteDist& d) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < d.size(); ++i)
    arr.push_back(ordered_json{{"x", d.xs[i]}, {"p", d.ps[i]}});
  return arr;
}

DiscreteDist dist_from_json(const ordered_json& j) {
  if (!j.is_array()) throw std::invalid_argument("distribution must be an array");
  if (j.empty()) return DiscreteDist{};
  std::vector<std::pair<double, double>> atoms;
  for (const auto& e : j)
    atoms.emplace_back(e.at("x").get<double>(), e.at("p").get<double>());
  return DiscreteDist::from_atoms(std::move(atoms));
}

ordered_json plan_to_json(const TransportPlan& plan) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : plan.rows)
    rows.push_back(ordered_json{{"bids", r.bids}, {"w", r.w}});
  return ordered_json{{"n", plan.n}, {"k", plan.k}, {"rows", rows}};
}

TransportPlan plan_from_json(const ordered_json& j) {
  TransportPlan plan;
  plan.n = j.at("n").get<int>();
  plan.k = j.at("k").get<int>();
  for (const auto& e : j.at("rows")) {
    TransportRow row;
    row.bids = e.at("bids").get<std::vector<double>>();
    row.w = e.at("w").get<double>();
    plan.rows.push_back(std::move(row));
  }
  return plan;
}

ordered_json signaling_to_json(const CalibratedSignaling& sig) {
  ordered_json meta{{"variant", sig.meta.variant},
                    {"convention", convention_name(sig.meta.convention)},
                    {"t1", sig.meta.t1},
                    {"t0", sig.meta.t0},
                    {"region", sig.meta.region},
                    {"threshold_fallback", sig.meta.threshold_fallback},
                    {"threshold_flagged", sig.meta.threshold_flagged}};
  if (sig.meta.has_ir) {
    meta["epsilon"] = sig.meta.epsilon;
    meta["M"] = sig.meta.M;
    meta["levels"] = sig.meta.levels;
    meta["t0_ir"] = sig.meta.t0_ir;
    meta["ir_deduction"] = sig.meta.ir_deduction;
  }
  ordered_json f1 = ordered_json::array(), f0 = ordered_json::array();
  for (int k = 0; k <= sig.family.n; ++k) {
    f1.push_back(k >= 1 ? dist_to_json(sig.family.f1[k]) : ordered_json::array());
    f0.push_back(k <= sig.family.n - 1 ? dist_to_json(sig.family.f0[k])
                                       : ordered_json::array());
  }
  ordered_json plans = ordered_json::array();
  for (const auto& p : sig.plans) plans.push_back(plan_to_json(p));
  return ordered_json{{"format", kFormatTag},
                      {"prior", prior_to_json(sig.prior)},
                      {"meta", meta},
                      {"family", ordered_json{{"f1", f1}, {"f0", f0}}},
                      {"plans", plans}};
}

CalibratedSignaling signaling_from_json(const ordered_json& j) {
  if (!j.contains("format") || j.at("format").get<std::string>() != kFormatTag)
    throw std::invalid_argument("not a calsig signaling document");
  CalibratedSignaling sig;
  sig.prior = prior_from_json(j.at("prior"));
  const auto& meta = j.at("meta");
  sig.meta.variant = meta.at("variant").get<std::string>();
  sig.meta.convention = convention_from(meta.at("convention").get<std::string>());
  sig.meta.t1 = meta.at("t1").get<double>();
  sig.meta.t0 = meta.at("t0").get<double>();
  sig.meta.region = meta.at("region").get<int>();
  sig.meta.threshold_fallback = meta.value("threshold_fallback", false);
  sig.meta.threshold_flagged = meta.value("threshold_flagged", false);
  if (meta.contains("epsilon")) {
    sig.meta.has_ir = true;
    sig.meta.epsilon = meta.at("epsilon").get<double>();
    sig.meta.M = meta.value("M", 0);
    sig.meta.levels = meta.value("levels", std::vector<double>{});
    sig.meta.t0_ir = meta.value("t0_ir", 0.0);
    sig.meta.ir_deduction = meta.value("ir_deduction", 0.0);
  }
  const auto& fam = j.at("family");
  sig.family.n = sig.prior.n;
  sig.family.f1.assign(sig.prior.n + 1, DiscreteDist{});
  sig.family.f0.assign(sig.prior.n + 1, DiscreteDist{});
  for (int k = 0; k <= sig.prior.n; ++k) {
    if (k >= 1) sig.family.f1[k] = dist_from_json(fam.at("f1").at(k));
    if (k <= sig.prior.n - 1) sig.family.f0[k] = dist_from_json(fam.at("f0").at(k));
  }
  for (const auto& p : j.at("plans")) sig.plans.push_back(plan_from_json(p));
  if (static_cast<int>(sig.plans.size()) != sig.prior.n + 1)
    throw std::invalid_argument("plan count must be n + 1");
  return sig;
}

ordered_json sim_report_to_json(const SimReport& rep) {
  ordered_json cal = ordered_json::array();
  for (const auto& row : rep.calibration)
    cal.push_back(ordered_json{{"value", row.value},
                               {"impressions", row.impressions},
                               {"clicks", row.clicks}});
  return ordered_json{{"samples", rep.samples},
                      {"seed", rep.seed},
                      {"shards", rep.shards},
                      {"revenue_mean", rep.revenue_mean},
                      {"revenue_stderr", rep.revenue_stderr},
                      {"calibration", cal},
                      {"utility_mean", rep.utility_mean},
                      {"utility_stderr", rep.utility_stderr}};
}

}  // namespace calsig
