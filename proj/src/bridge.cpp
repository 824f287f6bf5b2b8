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

#include "ribridge/bridge.hpp"

#include <algorithm>
#include <cmath>

namespace ribridge {
namespace {

// Restriction of the kernel and of log(nu) to the support of nu.
struct SupportView {
  std::vector<Eigen::Index> index;
  Matrix kernel;   // |S| x n
  Vector log_nu;   // |S|
};

SupportView restrict_to_support(const Matrix& kernel, const Vector& nu) {
  SupportView view;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu[i] > 0.0) view.index.push_back(i);
  }
  const auto s = static_cast<Eigen::Index>(view.index.size());
  view.kernel.resize(s, kernel.cols());
  view.log_nu.resize(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    view.kernel.row(k) = kernel.row(view.index[k]);
    view.log_nu[k] = std::log(nu[view.index[k]]);
  }
  return view;
}

// b(w) = log sum_a nu(a) exp(K(a,w) - a(a))
Vector update_state_potential(const SupportView& s, const Vector& a) {
  const Vector shift = s.log_nu - a;
  Vector b(s.kernel.cols());
  for (Eigen::Index j = 0; j < s.kernel.cols(); ++j) {
    b[j] = log_sum_exp(s.kernel.col(j) + shift);
  }
  return b;
}

// a(a) = log sum_w mu(w) exp(K(a,w) - b(w)), for every row of `kernel`.
Vector update_action_potential(const Matrix& kernel, const Vector& log_mu, const Vector& b) {
  const Eigen::RowVectorXd shift = (log_mu - b).transpose();
  Vector a(kernel.rows());
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    a[i] = log_sum_exp(kernel.row(i) + shift);
  }
  return a;
}

struct ScalingState {
  Vector a;  // on the support
  Vector b;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

// Each sweep refreshes b then a, so the row marginals are exact after a sweep
// and the residual is the column violation, read off the next b refresh.
ScalingState scale_log_domain(const SupportView& s, const Vector& log_mu, const Vector& mu,
                              const SinkhornConfig& cfg, Vector a) {
  ScalingState st;
  Vector b = update_state_potential(s, a);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    a = update_action_potential(s.kernel, log_mu, b);
    const Vector b_next = update_state_potential(s, a);
    const double residual =
        (mu.array() * ((b_next - b).array().exp() - 1.0)).abs().maxCoeff();
    if (cfg.record_history) st.history.push_back(residual);
    st.iterations = it;
    st.residual = residual;
    if (residual <= cfg.tolerance) {
      st.converged = true;
      break;
    }
    b = b_next;
  }
  st.a = std::move(a);
  st.b = std::move(b);
  return st;
}

ScalingState scale_plain_domain(const SupportView& s, const Vector& mu, const SinkhornConfig& cfg,
                                const Vector& a0) {
  ScalingState st;
  const Matrix gibbs = s.kernel.array().exp().matrix();
  const Vector nu = s.log_nu.array().exp().matrix();
  Vector x = (-a0.array()).exp().matrix();  // e^{-a}
  auto refresh_y = [&](const Vector& xs) {
    return Vector((gibbs.transpose() * nu.cwiseProduct(xs)).cwiseInverse());
  };
  Vector y = refresh_y(x);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    x = (gibbs * mu.cwiseProduct(y)).cwiseInverse();
    const Vector y_next = refresh_y(x);
    const double residual = (mu.array() * (y.array() / y_next.array() - 1.0)).abs().maxCoeff();
    if (cfg.record_history) st.history.push_back(residual);
    st.iterations = it;
    st.residual = residual;
    if (residual <= cfg.tolerance) {
      st.converged = true;
      break;
    }
    y = y_next;
  }
  st.a = -x.array().log().matrix();
  st.b = -y.array().log().matrix();
  return st;
}

}  // namespace

void require_valid(const SinkhornConfig& cfg) {
  if (!(cfg.tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be positive");
  if (cfg.max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
}

double dual_value(const Problem& problem, const ActionMarginal& nu, const Potentials& pot) {
  const Matrix kernel = gibbs_kernel(problem);
  const Vector& w = nu.weights();
  const Vector& mu = problem.prior;
  double linear = mu.dot(pot.b);
  double mass = 0.0;
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    if (w[i] <= 0.0) continue;
    linear += w[i] * pot.a[i];
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      mass += w[i] * mu[j] * std::exp(kernel(i, j) - pot.a[i] - pot.b[j]);
    }
  }
  return linear + mass - 1.0;
}

double primal_value(const Problem& problem, const ActionMarginal& nu, const Coupling& coupling) {
  const Matrix& p = coupling.joint();
  const Vector& w = nu.weights();
  const Vector& mu = problem.prior;
  double expected = 0.0;
  double divergence = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double pij = p(i, j);
      if (pij <= 0.0) continue;
      expected += pij * problem.utility(i, j);
      divergence += pij * (std::log(pij) - std::log(w[i]) - std::log(mu[j]));
    }
  }
  return expected / problem.lambda - divergence;
}

BridgeResult sinkhorn_bridge(const Problem& problem, const ActionMarginal& nu,
                             const SinkhornConfig& cfg) {
  require_valid(cfg);
  if (nu.size() != problem.num_actions()) {
    throw Error(ErrorCode::DimensionMismatch, "nu length does not match the number of actions");
  }
  const Matrix kernel = gibbs_kernel(problem);
  const Vector& mu = problem.prior;
  const Vector log_mu = mu.array().log().matrix();
  const SupportView support = restrict_to_support(kernel, nu.weights());
  const auto s = static_cast<Eigen::Index>(support.index.size());

  Vector a0 = Vector::Zero(s);
  if (cfg.initial_a) {
    if (cfg.initial_a->size() != problem.num_actions()) {
      throw Error(ErrorCode::DimensionMismatch, "initial_a has the wrong length");
    }
    for (Eigen::Index k = 0; k < s; ++k) a0[k] = (*cfg.initial_a)[support.index[k]];
  }

  ScalingState st = cfg.log_domain ? scale_log_domain(support, log_mu, mu, cfg, std::move(a0))
                                   : scale_plain_domain(support, mu, cfg, a0);

  // Normalize E_nu[a] = 0, then extend a off the support.
  const double shift = support.log_nu.array().exp().matrix().dot(st.a);
  Vector b = st.b.array() + shift;
  Vector a = update_action_potential(kernel, log_mu, b);
  for (Eigen::Index k = 0; k < s; ++k) a[support.index[k]] = st.a[k] - shift;

  Matrix joint = Matrix::Zero(problem.num_actions(), problem.num_states());
  for (Eigen::Index k = 0; k < s; ++k) {
    const auto i = support.index[k];
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      joint(i, j) = std::exp(support.log_nu[k] + log_mu[j] + kernel(i, j) - a[i] - b[j]);
    }
  }

  Potentials pot{std::move(a), std::move(b)};
  Coupling coupling(std::move(joint));
  const double primal = primal_value(problem, nu, coupling);
  const double dual = dual_value(problem, nu, pot);
  return BridgeResult{std::move(coupling), std::move(pot), primal,          dual,
                      st.iterations,       st.residual,    st.converged, std::move(st.history)};
}

std::pair<double, double> schrodinger_residual(const Problem& problem, const ActionMarginal& nu,
                                               const Potentials& pot) {
  const Matrix kernel = gibbs_kernel(problem);
  const Vector log_mu = problem.prior.array().log().matrix();
  const Vector rhs_a = update_action_potential(kernel, log_mu, pot.b);
  const double first = (pot.a - rhs_a).array().unaryExpr([](double d) { return std::expm1(d); })
                           .abs()
                           .maxCoeff();

  const SupportView support = restrict_to_support(kernel, nu.weights());
  Vector a_support(static_cast<Eigen::Index>(support.index.size()));
  for (Eigen::Index k = 0; k < a_support.size(); ++k) a_support[k] = pot.a[support.index[k]];
  const Vector rhs_b = update_state_potential(support, a_support);
  const double second = (pot.b - rhs_b).array().unaryExpr([](double d) { return std::expm1(d); })
                            .abs()
                            .maxCoeff();
  return {first, second};
}

Coupling bridge_coupling_from_potentials(const Problem& problem, const ActionMarginal& nu,
                                         const Potentials& pot) {
  const Matrix kernel = gibbs_kernel(problem);
  const Vector& w = nu.weights();
  const Vector& mu = problem.prior;
  Matrix joint = Matrix::Zero(kernel.rows(), kernel.cols());
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    if (w[i] <= 0.0) continue;
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      joint(i, j) = w[i] * mu[j] * std::exp(kernel(i, j) - pot.a[i] - pot.b[j]);
    }
  }
  constexpr double kTol = 1e-6;
  const double mass = joint.sum();
  const double row_dev = (Vector(joint.rowwise().sum()) - w).cwiseAbs().maxCoeff();
  const double col_dev = (Vector(joint.colwise().sum().transpose()) - mu).cwiseAbs().maxCoeff();
  if (!std::isfinite(mass) || std::abs(mass - 1.0) > kTol || row_dev > kTol || col_dev > kTol) {
    throw Error(ErrorCode::PotentialsInconsistent,
                "implied coupling has mass " + std::to_string(mass) + " and marginal deviation " +
                    std::to_string(std::max(row_dev, col_dev)));
  }
  // Absorb the <= 1e-6 mass defect so the result is a probability.
  joint /= mass;
  return Coupling(std::move(joint));
}

double additive_separability_check(const BridgeResult& result, const ActionMarginal& nu,
                                   const Vector& mu) {
  double separable = mu.dot(result.potentials.b);
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (nu[i] > 0.0) separable += nu[i] * result.potentials.a[i];
  }
  return std::abs(result.value_primal - separable);
}

}  // namespace ribridge
