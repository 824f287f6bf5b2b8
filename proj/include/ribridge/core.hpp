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

#ifndef RIBRIDGE_CORE_HPP_
#define RIBRIDGE_CORE_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ribridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Tolerance used when constructing probability vectors.
inline constexpr double kConstructionTol = 1e-12;
/// Tolerance used by cross-checks such as Bayes plausibility.
inline constexpr double kCrossCheckTol = 1e-8;

enum class ErrorCode {
  NonPositiveLambda,
  PriorNotSimplex,
  NonFiniteUtility,
  EmptyActionSet,
  EmptyStateSet,
  DimensionMismatch,
  NotAProbability,
  BayesPlausibilityViolated,
  PotentialsInconsistent,
  PosteriorNotNormalizable,
  TooManyActions,
  InvalidConfig,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type for every recoverable failure in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

/// A finite rational-inattention problem. Row index is the action, column
/// index is the state. `lambda` is in utils per nat.
struct Problem {
  std::vector<std::string> actions;
  std::vector<std::string> states;
  Matrix utility;
  double lambda = 1.0;
  Vector prior;

  Eigen::Index num_actions() const { return utility.rows(); }
  Eigen::Index num_states() const { return utility.cols(); }
};

/// Builds a problem with generated labels a1..am and w1..wn.
Problem make_problem(Matrix utility, double lambda, Vector prior);

/// Returns every violated invariant; empty means the problem is valid.
std::vector<ValidationIssue> validate(const Problem& problem);

/// Throws Error with the first issue if `validate` reports any.
void require_valid(const Problem& problem);

/// Removes states whose prior mass is exactly zero. Names of removed states
/// are appended to `dropped` when it is non-null.
Problem drop_null_states(Problem problem, std::vector<std::string>* dropped);

/// Probability vector over actions.
class ActionMarginal {
 public:
  /// Throws NotAProbability unless entries are >= 0 and sum to 1 within
  /// kConstructionTol.
  explicit ActionMarginal(Vector weights);

  static ActionMarginal uniform(Eigen::Index m);
  static ActionMarginal dirac(Eigen::Index m, Eigen::Index index);
  /// Rescales nonnegative weights onto the simplex.
  static ActionMarginal normalized(Vector weights);

  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }
  double operator[](Eigen::Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

/// Joint distribution over actions x states with cached marginals.
class Coupling {
 public:
  /// Throws NotAProbability if any entry is negative or the total mass is
  /// off by more than 1e-10.
  explicit Coupling(Matrix joint);

  const Matrix& joint() const noexcept { return joint_; }
  const Vector& action_marginal() const noexcept { return rows_; }
  const Vector& state_marginal() const noexcept { return cols_; }
  Eigen::Index num_actions() const { return joint_.rows(); }
  Eigen::Index num_states() const { return joint_.cols(); }

  /// P = nu (x) mu.
  static Coupling product(const Vector& nu, const Vector& mu);

 private:
  Matrix joint_;
  Vector rows_;
  Vector cols_;
};

/// Schrodinger potentials in nats, normalized so that E_nu[a] = 0.
struct Potentials {
  Vector a;
  Vector b;
};

/// u / lambda, in log domain.
Matrix gibbs_kernel(const Problem& problem);

/// D_KL(P || P_a (x) P_w) with 0 log 0 = 0, clamped at zero.
double mutual_information(const Coupling& coupling);

/// E_P[u]/lambda - I(P). Throws BayesPlausibilityViolated if the state
/// marginal of `coupling` differs from the prior by more than 1e-8.
double ri_objective(const Problem& problem, const Coupling& coupling);

/// log(sum_i exp(x_i)), ignoring -inf entries; returns -inf if all are.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& values) {
  const double top = values.maxCoeff();
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    acc += std::exp(values.derived().coeff(i) - top);
  }
  return top + std::log(acc);
}

}  // namespace ribridge

#endif  // RIBRIDGE_CORE_HPP_
