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

// Finitely supported distribution on [0, 1]. Support is strictly increasing,
// weights are positive and sum to 1 within 1e-9. Construction merges values
// closer than 1e-12 and drops atoms below 1e-15.
struct DiscreteDist {
  std::vector<double> xs;
  std::vector<double> ps;

  static DiscreteDist from_atoms(std::vector<std::pair<double, double>> atoms);
  static DiscreteDist point(double x);

  int size() const { return static_cast<int>(xs.size()); }
  double mean() const;
  double mass_at(double x) const;   // 1e-12 value match
  double mass_geq(double x) const;  // mass at values >= x - 1e-12
};

// Sorted representative values, clustering anything closer than tol.
std::vector<double> cluster_values(std::vector<double> values, double tol);

}  // namespace calsig
