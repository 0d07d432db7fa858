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

#include "calsig/prior.hpp"
#include "calsig/signaling.hpp"
#include "calsig/sim.hpp"
#include "json.hpp"

namespace calsig {

nlohmann::ordered_json prior_to_json(const PriorBySum& prior);
// Accepts {"n", "lambda": [...]} or {"bernoulli": {"n", "p"}}.
PriorBySum prior_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json dist_to_json(const DiscreteDist& d);
DiscreteDist dist_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json plan_to_json(const TransportPlan& plan);
TransportPlan plan_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json signaling_to_json(const CalibratedSignaling& sig);
CalibratedSignaling signaling_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json sim_report_to_json(const SimReport& rep);

}  // namespace calsig
