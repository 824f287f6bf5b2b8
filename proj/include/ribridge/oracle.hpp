// Copyright 2026 The ribridge Authors
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

// Brute-force references for small instances. Nothing here shares code with
// the solver beyond jensen_f itself.

#ifndef RIBRIDGE_ORACLE_HPP_
#define RIBRIDGE_ORACLE_HPP_

#include <cstddef>

#include "ribridge/core.hpp"

namespace ribridge {

struct GridSpec {
  double resolution = 1e-3;
  Eigen::Index max_actions = 4;

  /// 1e-3 for two actions, 1e-2 otherwise.
  static GridSpec defaults_for(Eigen::Index m);
};

struct GridResult {
  Vector nu_best;
  double f_best = 0.0;
  /// Bound L with max f - f_best <= L * resolution, from the largest spread of
  /// the partial derivatives of f seen on the grid.
  double lipschitz = 0.0;
  /// Lattice step actually used (1 / round(1 / resolution)).
  double resolution = 0.0;
  std::size_t points = 0;
};

/// Evaluates f on every point of the simplex lattice with the given step and
/// keeps the best; exact ties go to the lexicographically smallest nu.
/// Throws TooManyActions when m exceeds the cap.
GridResult grid_search_f(const Problem& problem, const GridSpec& grid);

/// KL(P || P_a (x) P_w) by a plain double loop over the joint.
double exhaustive_mi(const Matrix& joint);

}  // namespace ribridge

#endif  // RIBRIDGE_ORACLE_HPP_
