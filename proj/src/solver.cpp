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

#include "ribridge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ribridge {
namespace {

Vector log_weights(const ActionMarginal& nu) { return nu.weights().array().log().matrix(); }

void check_shape(const Problem& problem, const ActionMarginal& nu) {
  if (nu.size() != problem.num_actions()) {
    throw Error(ErrorCode::DimensionMismatch, "nu length does not match the number of actions");
  }
}

// log Z(w; nu) from a precomputed kernel.
Vector log_partition(const Matrix& kernel, const Vector& log_nu) {
  Vector b(kernel.cols());
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    b[j] = log_sum_exp(kernel.col(j) + log_nu);
  }
  return b;
}

Vector action_potential(const Matrix& kernel, const Vector& log_mu, const Vector& log_z) {
  const Eigen::RowVectorXd shift = (log_mu - log_z).transpose();
  Vector a(kernel.rows());
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    a[i] = log_sum_exp(kernel.row(i) + shift);
  }
  return a;
}

Vector expm1_of(const Vector& a) {
  return a.unaryExpr([](double x) { return std::expm1(x); });
}

// nu e^{a}, renormalized to absorb rounding drift.
ActionMarginal twist(const Vector& log_nu, const Vector& a) {
  Vector w = (log_nu + a).array().exp().matrix();
  return ActionMarginal::normalized(std::move(w));
}

// Newton steps for max f on the current support subject to sum(nu) = 1.
// Each accepted step must not lower f; returns false if no step was taken.
bool newton_polish(const Matrix& kernel, const Vector& prior, const Vector& log_mu,
                   double threshold, double foc_tol, ActionMarginal& nu, Vector& log_nu,
                   Vector& log_z, double& f, std::vector<double>* history) {
  constexpr int kMaxSteps = 50;
  constexpr double kTarget = 1e-14;
  bool moved = false;

  // Sub-threshold mass on strictly dominated actions only drags the support
  // off its plateau; BA would take it to zero in the limit.
  {
    const Vector a = action_potential(kernel, log_mu, log_z);
    Vector w = nu.weights();
    bool trimmed = false;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0 && w[i] <= threshold && a[i] < -foc_tol) {
        w[i] = 0.0;
        trimmed = true;
      }
    }
    if (trimmed) {
      ActionMarginal trial = ActionMarginal::normalized(std::move(w));
      const Vector trial_log_nu = log_weights(trial);
      const Vector trial_log_z = log_partition(kernel, trial_log_nu);
      const double trial_f = prior.dot(trial_log_z);
      if (trial_f >= f) {
        nu = std::move(trial);
        log_nu = trial_log_nu;
        log_z = trial_log_z;
        f = trial_f;
        if (history != nullptr) history->push_back(f);
        moved = true;
      }
    }
  }

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu[i] > threshold) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k < 2) return moved;

  for (int step = 0; step < kMaxSteps; ++step) {
    // G(i, w) = e^{K(i,w)} / Z(w); gradient e^{a_i} = sum_w mu G, Hessian -G diag(mu) G'.
    Matrix g_rows(k, kernel.cols());
    for (Eigen::Index c = 0; c < k; ++c) {
      g_rows.row(c) = (kernel.row(support[c]) - log_z.transpose()).array().exp().matrix();
    }
    const Vector grad = g_rows * prior;
    const Vector a_s = action_potential(kernel, log_mu, log_z)(support);
    if (a_s.cwiseAbs().maxCoeff() <= kTarget) break;

    Matrix kkt = Matrix::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = -(g_rows * prior.asDiagonal() * g_rows.transpose());
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    Vector rhs = Vector::Zero(k + 1);
    rhs.head(k) = -grad;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    const Vector dir = sol.head(k);
    if (!dir.allFinite()) break;

    double t = 1.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (dir[c] < 0.0) t = std::min(t, -0.9 * nu[support[c]] / dir[c]);
    }
    bool accepted = false;
    for (int halving = 0; halving < 30 && t > 0.0; ++halving, t *= 0.5) {
      Vector w = nu.weights();
      for (Eigen::Index c = 0; c < k; ++c) w[support[c]] += t * dir[c];
      if ((w.array() < 0.0).any()) continue;
      ActionMarginal trial = ActionMarginal::normalized(std::move(w));
      const Vector trial_log_nu = log_weights(trial);
      const Vector trial_log_z = log_partition(kernel, trial_log_nu);
      const double trial_f = prior.dot(trial_log_z);
      const Vector trial_a = action_potential(kernel, log_mu, trial_log_z)(support);
      if (trial_f >= f && trial_a.cwiseAbs().maxCoeff() < a_s.cwiseAbs().maxCoeff()) {
        nu = std::move(trial);
        log_nu = trial_log_nu;
        log_z = trial_log_z;
        f = trial_f;
        if (history != nullptr) history->push_back(f);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    moved = true;
  }
  return moved;
}

}  // namespace

void require_valid(const SolverConfig& cfg) {
  if (!(cfg.f_tolerance > 0.0) || !(cfg.foc_tolerance > 0.0) || !(cfg.support_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "solver thresholds must be positive");
  }
  if (cfg.max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
  if (cfg.init == InitKind::Custom && !cfg.custom_init) {
    throw Error(ErrorCode::InvalidConfig, "custom init requested without a marginal");
  }
  require_valid(cfg.sinkhorn);
}

double jensen_f(const Problem& problem, const ActionMarginal& nu) {
  check_shape(problem, nu);
  const Vector log_z = log_partition(gibbs_kernel(problem), log_weights(nu));
  return problem.prior.dot(log_z);
}

Vector partition_function(const Problem& problem, const ActionMarginal& nu) {
  check_shape(problem, nu);
  return log_partition(gibbs_kernel(problem), log_weights(nu));
}

Vector action_potential_candidate(const Problem& problem, const ActionMarginal& nu) {
  check_shape(problem, nu);
  const Matrix kernel = gibbs_kernel(problem);
  const Vector log_mu = problem.prior.array().log().matrix();
  return action_potential(kernel, log_mu, log_partition(kernel, log_weights(nu)));
}

Vector foc_residuals(const Problem& problem, const ActionMarginal& nu) {
  return expm1_of(action_potential_candidate(problem, nu));
}

ActionMarginal ba_step(const Problem& problem, const ActionMarginal& nu) {
  return twist(log_weights(nu), action_potential_candidate(problem, nu));
}

Matrix logit_policy(const Problem& problem, const ActionMarginal& nu) {
  check_shape(problem, nu);
  const Matrix kernel = gibbs_kernel(problem);
  const Vector log_nu = log_weights(nu);
  const Vector log_z = log_partition(kernel, log_nu);
  Matrix policy(kernel.rows(), kernel.cols());
  for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
    policy.col(j) = (kernel.col(j) + log_nu).array() - log_z[j];
    policy.col(j) = policy.col(j).array().exp();
  }
  return policy;
}

ActionMarginal initial_marginal(const Problem& problem, const SolverConfig& cfg) {
  const auto m = problem.num_actions();
  switch (cfg.init) {
    case InitKind::Uniform:
      return ActionMarginal::uniform(m);
    case InitKind::Custom:
      check_shape(problem, *cfg.custom_init);
      return *cfg.custom_init;
    case InitKind::Random: {
      std::mt19937_64 gen(cfg.seed);
      std::exponential_distribution<double> draw(1.0);
      Vector w(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        // Exponential draws normalize to a flat Dirichlet; keep full support.
        w[i] = std::max(draw(gen), std::numeric_limits<double>::min());
      }
      return ActionMarginal::normalized(std::move(w));
    }
  }
  return ActionMarginal::uniform(m);
}

std::vector<Eigen::Index> support_of(const Vector& nu, double threshold) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu[i] > threshold) out.push_back(i);
  }
  return out;
}

bool satisfies_plateau(const Vector& nu, const Vector& residuals, double tol, double threshold) {
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double r = residuals[i];
    if (!(r <= tol)) return false;
    if (nu[i] > threshold && std::abs(r) > tol) return false;
  }
  return true;
}

Solution solve(const Problem& problem, const SolverConfig& cfg) {
  require_valid(problem);
  require_valid(cfg);
  const Matrix kernel = gibbs_kernel(problem);
  const Vector log_mu = problem.prior.array().log().matrix();

  ActionMarginal nu = initial_marginal(problem, cfg);
  Vector log_nu = log_weights(nu);
  Vector log_z = log_partition(kernel, log_nu);
  double f = problem.prior.dot(log_z);
  std::vector<double> history;
  if (cfg.record_history) history.push_back(f);

  double increment = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool plateau = false;
  bool polished = false;
  Vector a;
  for (;;) {
    a = action_potential(kernel, log_mu, log_z);
    plateau = satisfies_plateau(nu.weights(), expm1_of(a), cfg.foc_tolerance,
                                cfg.support_threshold);
    if (plateau && increment < cfg.f_tolerance) {
      if (polished) break;
      polished = true;
      if (newton_polish(kernel, problem.prior, log_mu, cfg.support_threshold, cfg.foc_tolerance, nu,
                        log_nu, log_z, f,
                        cfg.record_history ? &history : nullptr)) {
        continue;
      }
      break;
    }
    if (iterations == cfg.max_iterations) break;

    nu = twist(log_nu, a);
    log_nu = log_weights(nu);
    log_z = log_partition(kernel, log_nu);
    const double f_next = problem.prior.dot(log_z);
    increment = f_next - f;
    f = f_next;
    ++iterations;
    if (cfg.record_history) history.push_back(f);
  }

  BridgeResult bridge = sinkhorn_bridge(problem, nu, cfg.sinkhorn);
  const bool converged = plateau && increment < cfg.f_tolerance && bridge.converged;
  auto support = support_of(nu.weights(), cfg.support_threshold);
  return Solution{std::move(nu),
                  std::move(bridge.coupling),
                  f,
                  std::move(bridge.potentials),
                  std::move(support),
                  expm1_of(a),
                  iterations,
                  converged,
                  bridge.residual,
                  bridge.value_primal,
                  bridge.value_dual,
                  std::move(history)};
}

}  // namespace ribridge
