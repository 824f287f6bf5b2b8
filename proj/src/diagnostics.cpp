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

#include "ribridge/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nnls.hpp"

namespace ribridge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector log_of(const Vector& v) { return v.array().log().matrix(); }

// P(a|w) from a stored joint, normalized by the joint's own column sums.
Matrix conditional_of(const Coupling& coupling) {
  Matrix cond = coupling.joint();
  const Vector& cols = coupling.state_marginal();
  for (Eigen::Index j = 0; j < cond.cols(); ++j) {
    if (cols[j] > 0.0) cond.col(j) /= cols[j];
  }
  return cond;
}

Vector random_simplex_point(Eigen::Index m, std::mt19937_64& gen) {
  std::exponential_distribution<double> draw(1.0);
  Vector w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    w[i] = std::max(draw(gen), std::numeric_limits<double>::min());
  }
  return w / w.sum();
}

// log sum_a nu(a) e^{beta u(a,w)} for a single state.
double log_partition_at(const Vector& log_nu, const Matrix& utility, Eigen::Index state,
                        double beta) {
  return log_sum_exp(log_nu + beta * utility.col(state));
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

template <typename F>
CheckResult guarded(const std::string& name, double tol, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return make_check(name, kInf, tol, e.what());
  }
}

}  // namespace

CheckResult make_check(std::string name, double max_violation, double tolerance,
                       std::string details) {
  CheckResult c;
  c.name = std::move(name);
  c.max_violation = max_violation;
  c.tolerance = tolerance;
  c.pass = max_violation <= tolerance;
  c.details = std::move(details);
  return c;
}

bool DiagnosticReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* DiagnosticReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double gateaux_f(const Problem& problem, const ActionMarginal& nu, const ActionMarginal& psi) {
  const Matrix kernel = gibbs_kernel(problem);
  const Vector log_nu = log_of(nu.weights());
  const Vector log_psi = log_of(psi.weights());
  double total = 0.0;
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    const double ratio =
        std::exp(log_sum_exp(kernel.col(j) + log_psi) - log_sum_exp(kernel.col(j) + log_nu));
    total += problem.prior[j] * ratio;
  }
  return total - 1.0;
}

double gateaux_f_numeric(const Problem& problem, const ActionMarginal& nu,
                         const ActionMarginal& psi, double h, bool richardson) {
  const double f0 = jensen_f(problem, nu);
  auto forward = [&](double step) {
    const ActionMarginal moved =
        ActionMarginal::normalized((1.0 - step) * nu.weights() + step * psi.weights());
    return (jensen_f(problem, moved) - f0) / step;
  };
  if (!richardson) return forward(h);
  return 2.0 * forward(0.5 * h) - forward(h);
}

GateauxPair gateaux_V(const Problem& problem, const ActionMarginal& nu, Eigen::Index alpha_star,
                      double h, SinkhornConfig cfg) {
  if ((nu.weights().array() <= 0.0).any()) {
    throw Error(ErrorCode::NotAProbability, "gateaux_V needs a strictly positive marginal");
  }
  const BridgeResult base = sinkhorn_bridge(problem, nu, cfg);
  const Vector& a = base.potentials.a;
  GateauxPair out;
  out.analytic = a[alpha_star] - nu.weights().dot(a);

  Vector moved = (1.0 - h) * nu.weights();
  moved[alpha_star] += h;
  const BridgeResult shifted = sinkhorn_bridge(problem, ActionMarginal::normalized(moved), cfg);
  out.numeric = (shifted.value_primal - base.value_primal) / h;
  return out;
}

GateauxPair gateaux_V_state(const Problem& problem, const ActionMarginal& nu,
                            Eigen::Index omega_star, double h, SinkhornConfig cfg) {
  const BridgeResult base = sinkhorn_bridge(problem, nu, cfg);
  const Vector& b = base.potentials.b;
  GateauxPair out;
  out.analytic = b[omega_star] - problem.prior.dot(b);

  Problem shifted_problem = problem;
  shifted_problem.prior = (1.0 - h) * problem.prior;
  shifted_problem.prior[omega_star] += h;
  shifted_problem.prior /= shifted_problem.prior.sum();
  const BridgeResult shifted = sinkhorn_bridge(shifted_problem, nu, cfg);
  out.numeric = (shifted.value_primal - base.value_primal) / h;
  return out;
}

PlateauResult plateau_check(const Vector& values, const Vector& weights, double tol,
                            double threshold) {
  PlateauResult out;
  out.level = -kInf;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (weights[i] > threshold) out.level = std::max(out.level, values[i]);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double v = std::max(values[i] - out.level, 0.0);
    if (weights[i] > threshold) v = std::max(v, std::abs(values[i] - out.level));
    if (std::isnan(values[i])) v = kInf;
    if (v > worst) {
      worst = v;
      out.witness = i;
    }
  }
  out.max_violation = worst;
  out.pass = worst <= tol;
  if (out.pass) out.witness = -1;
  return out;
}

CheckResult kt_check(const Problem& problem, const Solution& solution, double tol,
                     double threshold) {
  const Vector r = foc_residuals(problem, solution.nu_star);
  const Vector& nu = solution.nu_star.weights();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    worst = std::max(worst, nu[i] > threshold ? std::abs(r[i]) : std::max(r[i], 0.0));
  }
  return make_check("kt_plateau", worst, tol);
}

CheckResult gibbs_plateau_check(const Problem& problem, const Solution& solution, double tol,
                                double threshold) {
  const Matrix kernel = gibbs_kernel(problem);
  const Matrix cond = conditional_of(solution.coupling);
  const Vector& nu = solution.nu_star.weights();
  double worst = 0.0;
  Eigen::Index worst_state = -1;
  Vector values(kernel.rows());
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
      const double p = cond(i, j);
      if (nu[i] <= 0.0 || (p <= 0.0 && nu[i] <= threshold)) {
        values[i] = -kInf;
      } else {
        values[i] = kernel(i, j) - std::log(p / nu[i]);
      }
    }
    const PlateauResult pr = plateau_check(values, nu, tol, threshold);
    if (pr.max_violation > worst) {
      worst = pr.max_violation;
      worst_state = j;
    }
  }
  std::string details;
  if (worst_state >= 0) details = "worst state " + problem.states[worst_state];
  return make_check("gibbs_plateau", worst, tol, details);
}

std::vector<CheckResult> ilr_check(const Problem& problem, const Solution& solution,
                                   const IlrTolerances& tol) {
  const Matrix kernel = gibbs_kernel(problem);
  const Matrix& joint = solution.coupling.joint();
  const Vector& rows = solution.coupling.action_marginal();
  const Vector& nu = solution.nu_star.weights();
  const Vector log_z = partition_function(problem, solution.nu_star);
  const Vector log_mu = log_of(problem.prior);
  const auto m = kernel.rows();
  const auto n = kernel.cols();
  const auto support = support_of(nu, tol.threshold);

  double posterior_worst = 0.0;
  for (const auto i : support) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double stored = joint(i, j) / rows[i];
      const double formula = std::exp(log_mu[j] + kernel(i, j) - log_z[j]);
      posterior_worst = std::max(posterior_worst, std::abs(stored - formula));
    }
  }

  double eq_worst = 0.0;
  double ineq_worst = 0.0;
  Vector shifted(n);
  for (const auto k : support) {
    // log P(w | a') for the supported a' = k.
    const Vector log_post = (joint.row(k).transpose().array() / rows[k]).log().matrix();
    for (Eigen::Index i = 0; i < m; ++i) {
      shifted = kernel.row(i).transpose() - kernel.row(k).transpose() + log_post;
      const double cross = std::exp(log_sum_exp(shifted));
      ineq_worst = std::max(ineq_worst, cross - 1.0);
      if (nu[i] > tol.threshold) eq_worst = std::max(eq_worst, std::abs(cross - 1.0));
    }
  }
  return {make_check("ilr_posterior", posterior_worst, tol.posterior),
          make_check("ilr_equality", eq_worst, tol.equality),
          make_check("ilr_inequality", std::max(ineq_worst, 0.0), tol.inequality)};
}

BeliefFeasibility belief_feasibility(const Problem& problem, const std::vector<Eigen::Index>& B,
                                     Eigen::Index anchor, const Vector& posterior_anchor,
                                     double residual_tol) {
  if (B.empty() || std::find(B.begin(), B.end(), anchor) == B.end()) {
    throw Error(ErrorCode::InvalidConfig, "anchor must belong to a non-empty action set");
  }
  if (posterior_anchor.size() != problem.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "anchor posterior has the wrong length");
  }
  if (!posterior_anchor.allFinite() || (posterior_anchor.array() <= 0.0).any()) {
    throw Error(ErrorCode::NotAProbability, "anchor posterior must be strictly positive");
  }
  const Matrix kernel = gibbs_kernel(problem);
  const auto n = problem.num_states();
  const auto k = static_cast<Eigen::Index>(B.size());

  // Columns are the ILR-mapped posteriors; the last row enforces sum(nu) = 1.
  Matrix system(n + 1, k);
  BeliefFeasibility out;
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto alpha = B[static_cast<std::size_t>(c)];
    const Vector mapped =
        ((kernel.row(alpha) - kernel.row(anchor)).transpose().array().exp() *
         posterior_anchor.array())
            .matrix();
    const double mass = mapped.sum();
    if (!std::isfinite(mass) || !(mass > 0.0)) {
      out.error = ErrorCode::PosteriorNotNormalizable;
      out.residual = kInf;
      return out;
    }
    system.col(c).head(n) = mapped;
    system(n, c) = 1.0;
  }
  Vector target(n + 1);
  target.head(n) = problem.prior;
  target[n] = 1.0;

  out.weights = detail::nnls(system, target);
  out.residual = (system * out.weights - target).cwiseAbs().maxCoeff();
  out.feasible = out.residual <= residual_tol && (out.weights.array() >= -1e-10).all();
  out.full_support = (out.weights.array() > 1e-9).all();
  return out;
}

std::vector<CheckResult> cumulant_check(const Problem& problem, const Solution& solution,
                                        double h, const CumulantTolerances& tol) {
  const Matrix& u = problem.utility;
  const Vector log_nu = log_of(solution.nu_star.weights());
  const Matrix cond = conditional_of(solution.coupling);
  const double lambda = problem.lambda;
  const double beta = 1.0 / lambda;

  auto b_at = [&](Eigen::Index j, double bt) { return log_partition_at(log_nu, u, j, bt); };
  // lambda * b(w; 1/lambda), differentiated in lambda.
  auto free_at = [&](Eigen::Index j, double lam) { return lam * b_at(j, 1.0 / lam); };

  double first_worst = 0.0;
  double second_worst = 0.0;
  double gain_worst = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    auto d1 = [&](double s) { return (b_at(j, beta + s) - b_at(j, beta - s)) / (2.0 * s); };
    auto d2 = [&](double s) {
      return (b_at(j, beta + s) - 2.0 * b_at(j, beta) + b_at(j, beta - s)) / (s * s);
    };
    const double step = h * lambda;
    auto dl = [&](double s) { return (free_at(j, lambda + s) - free_at(j, lambda - s)) / (2.0 * s); };

    const double first_fd = (4.0 * d1(0.5 * h) - d1(h)) / 3.0;
    const double second_fd = (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
    const double dfree = (4.0 * dl(0.5 * step) - dl(step)) / 3.0;

    const Vector p = cond.col(j);
    const double mean = p.dot(u.col(j));
    const double var = (p.array() * (u.col(j).array() - mean).square()).sum();
    double kl = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) kl += p[i] * (std::log(p[i]) - log_nu[i]);
    }

    first_worst = std::max(first_worst, std::abs(first_fd - mean));
    second_worst = std::max(second_worst, std::abs(second_fd - var));
    gain_worst = std::max(gain_worst, std::abs(kl + dfree));
  }
  return {make_check("cumulant_first_moment", first_worst, tol.first_moment),
          make_check("cumulant_second_moment", second_worst, tol.second_moment),
          make_check("cumulant_information_gain", gain_worst, tol.information_gain)};
}

double average_free_energy(const Problem& problem, const Matrix& conditional,
                           const Vector& reference) {
  const Matrix& u = problem.utility;
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    double energy = 0.0;
    double kl = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double q = conditional(i, j);
      if (q <= 0.0) continue;
      energy -= q * u(i, j);
      if (reference[i] <= 0.0) return kInf;
      kl += q * std::log(q / reference[i]);
    }
    total += problem.prior[j] * (energy + problem.lambda * kl);
  }
  return total;
}

CheckResult free_energy_check(const Problem& problem, const Solution& solution,
                              std::size_t trials, std::uint64_t seed, double tol) {
  const Matrix policy = conditional_of(solution.coupling);
  const Vector& reference = solution.nu_star.weights();
  const double base = average_free_energy(problem, policy, reference);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> exponent(0.0, 6.0);
  double worst = 0.0;
  Matrix q(policy.rows(), policy.cols());
  for (std::size_t t = 0; t < trials; ++t) {
    // Mixing weights spread log-uniformly over [1e-6, 1].
    const double mix = std::pow(10.0, -exponent(gen));
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      q.col(j) = (1.0 - mix) * policy.col(j) + mix * random_simplex_point(q.rows(), gen);
    }
    const double value = average_free_energy(problem, q, reference);
    worst = std::max(worst, base - value);
  }
  return make_check("free_energy_minimality", worst, tol,
                    std::to_string(trials) + " perturbations, base " + format_double(base));
}

DiagnosticReport diagnose(const Problem& problem, const Solution& solution,
                          const DiagnoseConfig& cfg) {
  require_valid(problem);
  if (solution.nu_star.size() != problem.num_actions() ||
      solution.coupling.num_actions() != problem.num_actions() ||
      solution.coupling.num_states() != problem.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "solution does not match the problem dimensions");
  }
  DiagnosticReport report;
  auto& out = report.checks;
  const ActionMarginal& nu = solution.nu_star;
  const auto m = problem.num_actions();

  out.push_back(kt_check(problem, solution, cfg.foc_tolerance, cfg.support_threshold));
  out.push_back(guarded("potential_sign_agreement", 0.0, [&] {
    const Vector a = action_potential_candidate(problem, nu);
    const Vector r = foc_residuals(problem, nu);
    double mismatches = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
      if (sign(a[i]) != sign(r[i])) mismatches += 1.0;
    }
    return make_check("potential_sign_agreement", mismatches, 0.0);
  }));

  // Entropic-transport certificates from a fresh bridge at nu*.
  const BridgeResult bridge = sinkhorn_bridge(problem, nu);
  out.push_back(make_check("bridge_marginal_residual", bridge.residual, 1e-10));
  out.push_back(make_check("duality_gap", bridge.duality_gap(), 1e-8));
  out.push_back(make_check("additive_separability",
                           additive_separability_check(bridge, nu, problem.prior), 1e-8));
  {
    const auto [ra, rb] = schrodinger_residual(problem, nu, bridge.potentials);
    out.push_back(make_check("schrodinger_residual", std::max(ra, rb), 1e-9));
  }
  out.push_back(make_check("coupling_matches_bridge",
                           (solution.coupling.joint() - bridge.coupling.joint()).cwiseAbs().maxCoeff(),
                           1e-8));
  out.push_back(make_check("f_equals_V", std::abs(jensen_f(problem, nu) - bridge.value_primal),
                           1e-6));
  out.push_back(guarded("f_equals_objective", 1e-6, [&] {
    return make_check("f_equals_objective",
                      std::abs(jensen_f(problem, nu) - ri_objective(problem, solution.coupling)),
                      1e-6);
  }));

  out.push_back(gibbs_plateau_check(problem, solution, cfg.foc_tolerance, cfg.support_threshold));
  for (auto& c : ilr_check(problem, solution, {.threshold = cfg.support_threshold})) {
    out.push_back(std::move(c));
  }
  out.push_back(guarded("belief_feasibility", 1e-8, [&] {
    const auto support = support_of(nu.weights(), cfg.support_threshold);
    const auto anchor = support.front();
    const Vector posterior =
        solution.coupling.joint().row(anchor).transpose() / solution.coupling.action_marginal()[anchor];
    const BeliefFeasibility bf = belief_feasibility(problem, support, anchor, posterior);
    const double v = bf.feasible && bf.full_support ? bf.residual : kInf;
    return make_check("belief_feasibility", v, 1e-8,
                      "consideration set size " + std::to_string(support.size()));
  }));
  for (auto& c : cumulant_check(problem, solution, cfg.cumulant_step)) out.push_back(std::move(c));
  out.push_back(free_energy_check(problem, solution, cfg.free_energy_trials, cfg.seed));

  std::mt19937_64 gen(cfg.seed);
  {
    double worst = 0.0;
    for (std::size_t d = 0; d < cfg.gateaux_directions; ++d) {
      const ActionMarginal psi(random_simplex_point(m, gen));
      const double analytic = gateaux_f(problem, nu, psi);
      const double numeric = gateaux_f_numeric(problem, nu, psi, cfg.gateaux_step);
      worst = std::max(worst, std::abs(analytic - numeric));
    }
    out.push_back(make_check("gateaux_f", worst, cfg.gateaux_tolerance,
                             std::to_string(cfg.gateaux_directions) + " random directions"));
  }
  out.push_back(guarded("gateaux_V", cfg.gateaux_tolerance, [&] {
    const ActionMarginal interior(random_simplex_point(m, gen));
    double worst = 0.0;
    const auto count = std::min<Eigen::Index>(m, static_cast<Eigen::Index>(cfg.gateaux_directions));
    for (Eigen::Index i = 0; i < count; ++i) {
      const GateauxPair g = gateaux_V(problem, interior, i, cfg.gateaux_step);
      worst = std::max(worst, std::abs(g.analytic - g.numeric));
    }
    const auto states =
        std::min<Eigen::Index>(problem.num_states(), static_cast<Eigen::Index>(cfg.gateaux_directions));
    for (Eigen::Index j = 0; j < states; ++j) {
      const GateauxPair g = gateaux_V_state(problem, interior, j, cfg.gateaux_step);
      worst = std::max(worst, std::abs(g.analytic - g.numeric));
    }
    return make_check("gateaux_V", worst, cfg.gateaux_tolerance, "random interior marginal");
  }));
  return report;
}

}  // namespace ribridge
