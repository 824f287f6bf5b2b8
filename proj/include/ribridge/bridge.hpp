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

// Inner problem: the entropic bridge between a fixed action marginal and the
// prior, computed by alternating Sinkhorn scaling of the kernel exp(u/lambda).

#ifndef RIBRIDGE_BRIDGE_HPP_
#define RIBRIDGE_BRIDGE_HPP_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ribridge/core.hpp"

namespace ribridge {

struct SinkhornConfig {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10'000;
  bool log_domain = true;
  /// Starting action potential on the support of nu; zero when unset.
  std::optional<Vector> initial_a;
  /// Record the marginal residual after every sweep in `residual_history`.
  bool record_history = false;
};

void require_valid(const SinkhornConfig& cfg);

struct BridgeResult {
  Coupling coupling;
  Potentials potentials;
  double value_primal = 0.0;
  double value_dual = 0.0;
  std::size_t iterations = 0;
  /// Sup-norm violation of the two marginal constraints.
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;

  double duality_gap() const { return std::abs(value_primal - value_dual); }
};

/// Solves the bridge between `nu` and the prior. Actions with nu = 0 are
/// excluded from scaling and come back as zero coupling rows; their action
/// potential is the Schrodinger-equation extension. A result with
/// `converged == false` is the best iterate after max_iterations.
BridgeResult sinkhorn_bridge(const Problem& problem, const ActionMarginal& nu,
                             const SinkhornConfig& cfg = {});

/// Sup-norm violations of the two Schrodinger equations,
///   e^{a} = sum_w mu e^{u/lambda - b},  e^{b} = sum_a nu e^{u/lambda - a},
/// each measured as |exp(lhs - rhs) - 1| in log domain. The first equation is
/// checked at every action, the second at every state.
std::pair<double, double> schrodinger_residual(const Problem& problem, const ActionMarginal& nu,
                                               const Potentials& pot);

/// P(a,w) = nu(a) mu(w) exp(u/lambda - a - b). Throws PotentialsInconsistent
/// if the mass or either marginal is off by more than 1e-6.
Coupling bridge_coupling_from_potentials(const Problem& problem, const ActionMarginal& nu,
                                         const Potentials& pot);

/// |V(nu) - (E_nu[a] + E_mu[b])|.
double additive_separability_check(const BridgeResult& result, const ActionMarginal& nu,
                                   const Vector& mu);

/// sum a nu + sum b mu + sum sum nu mu exp(u/lambda - a - b) - 1.
double dual_value(const Problem& problem, const ActionMarginal& nu, const Potentials& pot);

/// Sinkhorn value V(nu) = E_P[u]/lambda - D_KL(P || nu (x) mu) of a coupling.
double primal_value(const Problem& problem, const ActionMarginal& nu, const Coupling& coupling);

}  // namespace ribridge

#endif  // RIBRIDGE_BRIDGE_HPP_
