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

// Outer problem: choose the action marginal nu maximizing the Jensen envelope
//
//   f(nu) = sum_w mu(w) log sum_a nu(a) exp(u(a,w)/lambda)
//
// whose maximizers coincide with those of the bridge value V(nu). The ascent
// is Blahut-Arimoto, written as the augmented Sinkhorn sweep
//
//   b_n = log Z(.; nu_n),  a_n = log sum_w mu e^{u/lambda - b_n},
//   nu_{n+1} = nu_n e^{a_n}.
//
// A marginal is optimal iff r(a) = e^{a_nu(a)} - 1 is a nu-plateau at zero:
// r = 0 on the support and r <= 0 everywhere.

#ifndef RIBRIDGE_SOLVER_HPP_
#define RIBRIDGE_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ribridge/bridge.hpp"
#include "ribridge/core.hpp"

namespace ribridge {

enum class InitKind { Uniform, Custom, Random };

struct SolverConfig {
  double f_tolerance = 1e-12;
  double foc_tolerance = 1e-7;
  double support_threshold = 1e-9;
  std::size_t max_iterations = 100'000;
  InitKind init = InitKind::Uniform;
  std::optional<ActionMarginal> custom_init;
  std::uint64_t seed = 0;
  /// Record f(nu_n) for every iterate in `Solution::f_history`.
  bool record_history = false;
  SinkhornConfig sinkhorn{};
};

void require_valid(const SolverConfig& cfg);

struct Solution {
  ActionMarginal nu_star;
  Coupling coupling;
  double f_value = 0.0;
  Potentials potentials;
  std::vector<Eigen::Index> consideration_set;
  Vector foc_residuals;
  std::size_t iterations = 0;
  bool converged = false;
  /// Result of the bridge solve at nu_star.
  double bridge_residual = 0.0;
  double value_primal = 0.0;
  double value_dual = 0.0;
  std::vector<double> f_history;
};

/// f(nu), by log-sum-exp per state.
double jensen_f(const Problem& problem, const ActionMarginal& nu);

/// log Z(w; nu) = log sum_a nu(a) e^{u(a,w)/lambda}, one entry per state.
Vector partition_function(const Problem& problem, const ActionMarginal& nu);

/// a_nu(a) = log sum_w mu(w) e^{u(a,w)/lambda - log Z(w; nu)}, at every action.
Vector action_potential_candidate(const Problem& problem, const ActionMarginal& nu);

/// r(a) = sum_w mu(w) e^{u(a,w)/lambda} / Z(w; nu) - 1 = expm1(a_nu(a)), so
/// sign(r) equals sign(a_nu) exactly.
Vector foc_residuals(const Problem& problem, const ActionMarginal& nu);

/// One Blahut-Arimoto step nu'(a) = nu(a) e^{a_nu(a)}, renormalized.
ActionMarginal ba_step(const Problem& problem, const ActionMarginal& nu);

/// Column-stochastic P(a|w) = nu(a) e^{u(a,w)/lambda} / Z(w; nu).
Matrix logit_policy(const Problem& problem, const ActionMarginal& nu);

/// Starting marginal selected by `cfg.init`. Random draws are flat Dirichlet
/// from a generator seeded with `cfg.seed`.
ActionMarginal initial_marginal(const Problem& problem, const SolverConfig& cfg);

/// Indices with nu(a) > threshold.
std::vector<Eigen::Index> support_of(const Vector& nu, double threshold);

/// True when r is within tol of zero on {nu > threshold} and <= tol elsewhere.
bool satisfies_plateau(const Vector& nu, const Vector& residuals, double tol, double threshold);

/// Runs Blahut-Arimoto from the configured start until the f increment drops
/// below f_tolerance and the Kuhn-Tucker plateau holds at foc_tolerance, then
/// solves the bridge at the final marginal. `converged == false` carries the
/// best iterate when max_iterations is exhausted.
Solution solve(const Problem& problem, const SolverConfig& cfg = {});

}  // namespace ribridge

#endif  // RIBRIDGE_SOLVER_HPP_
