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

// Numerical certificates for a solved instance. Every check reports the
// largest violation it saw next to the tolerance it was held to.

#ifndef RIBRIDGE_DIAGNOSTICS_HPP_
#define RIBRIDGE_DIAGNOSTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ribridge/bridge.hpp"
#include "ribridge/core.hpp"
#include "ribridge/solver.hpp"

namespace ribridge {

struct CheckResult {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string details;
};

/// Builds a result with pass = (max_violation <= tolerance); NaN fails.
CheckResult make_check(std::string name, double max_violation, double tolerance,
                       std::string details = {});

struct DiagnosticReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Directional derivatives

/// d/dh f((1-h) nu + h psi) at h = 0, in closed form.
double gateaux_f(const Problem& problem, const ActionMarginal& nu, const ActionMarginal& psi);

/// Forward difference [f((1-h) nu + h psi) - f(nu)] / h, optionally
/// Richardson-extrapolated once against step h/2.
double gateaux_f_numeric(const Problem& problem, const ActionMarginal& nu,
                         const ActionMarginal& psi, double h, bool richardson = true);

// Sinkhorn settings for finite-difference bridges; differences of values
// need a tighter marginal tolerance than a single solve.
inline SinkhornConfig fine_sinkhorn() {
  SinkhornConfig cfg;
  cfg.tolerance = 1e-12;
  return cfg;
}

struct GateauxPair {
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Derivative of V when mass moves toward action `alpha_star`: analytic
/// a(alpha*) - E_nu[a] from the bridge potentials, numeric from two bridge
/// solves. Requires nu > 0 everywhere. The bridge tolerance defaults to 1e-12.
GateauxPair gateaux_V(const Problem& problem, const ActionMarginal& nu, Eigen::Index alpha_star,
                      double h, SinkhornConfig cfg = fine_sinkhorn());

/// Same with the prior moved toward state `omega_star`: b(w*) - E_mu[b].
GateauxPair gateaux_V_state(const Problem& problem, const ActionMarginal& nu,
                            Eigen::Index omega_star, double h,
                            SinkhornConfig cfg = fine_sinkhorn());

// ---------------------------------------------------------------------------
// Plateaus

struct PlateauResult {
  bool pass = false;
  /// Worst offending index, or -1 when everything passes.
  Eigen::Index witness = -1;
  double max_violation = 0.0;
  /// Level of the plateau: max of values over {weights > threshold}.
  double level = 0.0;
};

/// Passes iff values <= level + tol everywhere and |values - level| <= tol
/// wherever weights > threshold.
PlateauResult plateau_check(const Vector& values, const Vector& weights, double tol,
                            double threshold = 1e-9);

/// Kuhn-Tucker plateau at level zero for foc residuals.
CheckResult kt_check(const Problem& problem, const Solution& solution, double tol = 1e-7,
                     double threshold = 1e-9);

/// For each state, a -> u/lambda - log(P(a|w) / nu*(a)) must be constant on
/// the support of nu*, and no higher elsewhere, using the stored coupling.
CheckResult gibbs_plateau_check(const Problem& problem, const Solution& solution,
                                double tol = 1e-7, double threshold = 1e-9);

// ---------------------------------------------------------------------------
// Invariant likelihood ratios and consideration sets

struct IlrTolerances {
  double posterior = 1e-8;
  double equality = 1e-7;
  double inequality = 1e-7;
  double threshold = 1e-9;
};

/// Three entries: ilr_posterior (P(w|a) = mu e^{u/lambda} / Z on the support),
/// ilr_equality (cross sums equal 1 between supported actions) and
/// ilr_inequality (cross sums at most 1 for every action).
std::vector<CheckResult> ilr_check(const Problem& problem, const Solution& solution,
                                   const IlrTolerances& tol = {});

struct BeliefFeasibility {
  bool feasible = false;
  /// Every action of B carries weight above 1e-9.
  bool full_support = false;
  /// Weights on B, in the order of B; empty when a posterior was rejected.
  Vector weights;
  double residual = 0.0;
  std::optional<ErrorCode> error;
};

/// Maps the anchor posterior to every action of B through the likelihood
/// ratios exp((u(a,.) - u(anchor,.)) / lambda) and asks whether nonnegative
/// weights summing to one average the posteriors back to the prior.
BeliefFeasibility belief_feasibility(const Problem& problem, const std::vector<Eigen::Index>& B,
                                     Eigen::Index anchor, const Vector& posterior_anchor,
                                     double residual_tol = 1e-8);

// ---------------------------------------------------------------------------
// Statistical-mechanics identities

struct CumulantTolerances {
  double first_moment = 1e-6;
  double second_moment = 1e-4;
  double information_gain = 1e-5;
};

/// With nu* fixed, b(w; beta) = log sum nu* e^{beta u} for beta = 1/lambda.
/// Checks dB/dbeta = E[u|w], d2B/dbeta2 = Var(u|w), and
/// KL(P(.|w) || nu*) = -d[lambda b]/dlambda, against the stored coupling.
std::vector<CheckResult> cumulant_check(const Problem& problem, const Solution& solution,
                                        double h = 1e-4, const CumulantTolerances& tol = {});

/// sum_w mu(w) [ -E_Q[u|w] + lambda KL(Q(.|w) || reference) ] for a
/// column-stochastic conditional Q(a|w).
double average_free_energy(const Problem& problem, const Matrix& conditional,
                           const Vector& reference);

/// Random Bayes-plausible perturbations of the solved policy never lower the
/// average free energy (reference nu*) by more than tol.
CheckResult free_energy_check(const Problem& problem, const Solution& solution,
                              std::size_t trials, std::uint64_t seed, double tol = 1e-9);

// ---------------------------------------------------------------------------

struct DiagnoseConfig {
  std::uint64_t seed = 1;
  std::size_t free_energy_trials = 100;
  std::size_t gateaux_directions = 10;
  double gateaux_step = 1e-5;
  double gateaux_tolerance = 1e-3;
  double cumulant_step = 1e-4;
  double foc_tolerance = 1e-7;
  double support_threshold = 1e-9;
};

/// Runs every check on a solved instance. The bridge certificates come from
/// a fresh solve at nu*; the plateau, ILR, cumulant and free-energy checks
/// read the stored coupling.
DiagnosticReport diagnose(const Problem& problem, const Solution& solution,
                          const DiagnoseConfig& cfg = {});

}  // namespace ribridge

#endif  // RIBRIDGE_DIAGNOSTICS_HPP_
