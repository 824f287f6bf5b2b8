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

#include "ribridge/core.hpp"

#include <cmath>
#include <sstream>

namespace ribridge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::PriorNotSimplex: return "PriorNotSimplex";
    case ErrorCode::NonFiniteUtility: return "NonFiniteUtility";
    case ErrorCode::EmptyActionSet: return "EmptyActionSet";
    case ErrorCode::EmptyStateSet: return "EmptyStateSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAProbability: return "NotAProbability";
    case ErrorCode::BayesPlausibilityViolated: return "BayesPlausibilityViolated";
    case ErrorCode::PotentialsInconsistent: return "PotentialsInconsistent";
    case ErrorCode::PosteriorNotNormalizable: return "PosteriorNotNormalizable";
    case ErrorCode::TooManyActions: return "TooManyActions";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Problem make_problem(Matrix utility, double lambda, Vector prior) {
  Problem p;
  for (Eigen::Index i = 0; i < utility.rows(); ++i) {
    p.actions.push_back("a" + std::to_string(i + 1));
  }
  for (Eigen::Index j = 0; j < utility.cols(); ++j) {
    p.states.push_back("w" + std::to_string(j + 1));
  }
  p.utility = std::move(utility);
  p.lambda = lambda;
  p.prior = std::move(prior);
  return p;
}

std::vector<ValidationIssue> validate(const Problem& problem) {
  std::vector<ValidationIssue> issues;
  const auto m = problem.num_actions();
  const auto n = problem.num_states();
  if (m < 1 || problem.actions.empty()) {
    issues.push_back({ErrorCode::EmptyActionSet, "at least one action is required"});
  }
  if (n < 1 || problem.states.empty()) {
    issues.push_back({ErrorCode::EmptyStateSet, "at least one state is required"});
  }
  if (static_cast<Eigen::Index>(problem.actions.size()) != m ||
      static_cast<Eigen::Index>(problem.states.size()) != n ||
      problem.prior.size() != n) {
    std::ostringstream os;
    os << "utility is " << m << "x" << n << " but there are " << problem.actions.size()
       << " actions, " << problem.states.size() << " states and " << problem.prior.size()
       << " prior entries";
    issues.push_back({ErrorCode::DimensionMismatch, os.str()});
  }
  if (!(problem.lambda > 0.0) || !std::isfinite(problem.lambda)) {
    issues.push_back({ErrorCode::NonPositiveLambda,
                      "lambda must be a positive finite number, got " +
                          std::to_string(problem.lambda)});
  }
  if (!problem.utility.allFinite()) {
    issues.push_back({ErrorCode::NonFiniteUtility, "utility has non-finite entries"});
  }
  if (problem.prior.size() > 0) {
    const bool positive = (problem.prior.array() > 0.0).all() && problem.prior.allFinite();
    const double total = problem.prior.sum();
    if (!positive || std::abs(total - 1.0) > kConstructionTol) {
      std::ostringstream os;
      os.precision(17);
      os << "prior must be strictly positive and sum to 1, sum is " << total;
      issues.push_back({ErrorCode::PriorNotSimplex, os.str()});
    }
  }
  return issues;
}

void require_valid(const Problem& problem) {
  const auto issues = validate(problem);
  if (!issues.empty()) throw Error(issues.front().code, issues.front().message);
}

Problem drop_null_states(Problem problem, std::vector<std::string>* dropped) {
  const auto n = problem.num_states();
  if (problem.prior.size() != n || static_cast<Eigen::Index>(problem.states.size()) != n) {
    return problem;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (problem.prior[j] == 0.0) {
      if (dropped) dropped->push_back(problem.states[j]);
    } else {
      keep.push_back(j);
    }
  }
  if (static_cast<Eigen::Index>(keep.size()) == n) return problem;

  Problem out;
  out.actions = problem.actions;
  out.lambda = problem.lambda;
  out.utility.resize(problem.num_actions(), static_cast<Eigen::Index>(keep.size()));
  out.prior.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto j = keep[k];
    out.states.push_back(problem.states[j]);
    out.utility.col(static_cast<Eigen::Index>(k)) = problem.utility.col(j);
    out.prior[static_cast<Eigen::Index>(k)] = problem.prior[j];
  }
  return out;
}

ActionMarginal::ActionMarginal(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw Error(ErrorCode::NotAProbability, "action marginal is empty");
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw Error(ErrorCode::NotAProbability, "action marginal has negative or non-finite entries");
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kConstructionTol) {
    std::ostringstream os;
    os.precision(17);
    os << "action marginal sums to " << total;
    throw Error(ErrorCode::NotAProbability, os.str());
  }
}

ActionMarginal ActionMarginal::uniform(Eigen::Index m) {
  return ActionMarginal(Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

ActionMarginal ActionMarginal::dirac(Eigen::Index m, Eigen::Index index) {
  Vector w = Vector::Zero(m);
  w[index] = 1.0;
  return ActionMarginal(std::move(w));
}

ActionMarginal ActionMarginal::normalized(Vector weights) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::NotAProbability, "weights have no positive finite mass");
  }
  weights /= total;
  return ActionMarginal(std::move(weights));
}

Coupling::Coupling(Matrix joint) : joint_(std::move(joint)) {
  if (!joint_.allFinite() || (joint_.array() < 0.0).any()) {
    throw Error(ErrorCode::NotAProbability, "coupling has negative or non-finite entries");
  }
  const double total = joint_.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "coupling has total mass " << total;
    throw Error(ErrorCode::NotAProbability, os.str());
  }
  rows_ = joint_.rowwise().sum();
  cols_ = joint_.colwise().sum().transpose();
}

Coupling Coupling::product(const Vector& nu, const Vector& mu) {
  return Coupling(nu * mu.transpose());
}

Matrix gibbs_kernel(const Problem& problem) { return problem.utility / problem.lambda; }

double mutual_information(const Coupling& coupling) {
  const Matrix& p = coupling.joint();
  const Vector& rows = coupling.action_marginal();
  const Vector& cols = coupling.state_marginal();
  double total = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double pij = p(i, j);
      if (pij <= 0.0) continue;
      total += pij * (std::log(pij) - std::log(rows[i]) - std::log(cols[j]));
    }
  }
  return total < 0.0 ? 0.0 : total;
}

double ri_objective(const Problem& problem, const Coupling& coupling) {
  if (coupling.num_actions() != problem.num_actions() ||
      coupling.num_states() != problem.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "coupling shape does not match problem");
  }
  const double deviation = (coupling.state_marginal() - problem.prior).cwiseAbs().maxCoeff();
  if (deviation > kCrossCheckTol) {
    throw Error(ErrorCode::BayesPlausibilityViolated,
                "state marginal deviates from prior by " + std::to_string(deviation));
  }
  const double expected = (coupling.joint().array() * problem.utility.array()).sum() / problem.lambda;
  return expected - mutual_information(coupling);
}

}  // namespace ribridge
