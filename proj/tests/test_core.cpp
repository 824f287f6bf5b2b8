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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ribridge/bridge.hpp"
#include "ribridge/core.hpp"
#include "ribridge/oracle.hpp"
#include "ribridge/solver.hpp"
#include "support.hpp"

using namespace ribridge;
using ribridge::testing::Gen;

namespace {

bool has_issue(const Problem& p, ErrorCode code) {
  for (const auto& issue : validate(p)) {
    if (issue.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate accepts a well-formed 2x2 problem") {
  CHECK(validate(testing::symmetric_2x2()).empty());
}

TEST_CASE("validate reports each violated invariant") {
  Problem p = testing::symmetric_2x2();
  p.lambda = 0.0;
  CHECK(has_issue(p, ErrorCode::NonPositiveLambda));
  CHECK_THROWS_AS(require_valid(p), Error);

  p = testing::symmetric_2x2();
  p.prior = Vector(2);
  p.prior << 0.7, 0.2;
  CHECK(has_issue(p, ErrorCode::PriorNotSimplex));

  p = testing::symmetric_2x2();
  p.utility(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(has_issue(p, ErrorCode::NonFiniteUtility));

  p = testing::symmetric_2x2();
  p.utility(1, 1) = std::nan("");
  p.lambda = -2.0;
  const auto issues = validate(p);
  CHECK(issues.size() >= 2);

  Problem empty = make_problem(Matrix(0, 2), 1.0, Vector::Constant(2, 0.5));
  CHECK(has_issue(empty, ErrorCode::EmptyActionSet));
}

TEST_CASE("zero-prior states are dropped with their labels reported") {
  Matrix u(2, 3);
  u << 1, 0, 5, 0, 1, 5;
  Vector mu(3);
  mu << 0.5, 0.5, 0.0;
  std::vector<std::string> dropped;
  const Problem p = drop_null_states(make_problem(u, 1.0, mu), &dropped);
  CHECK(p.num_states() == 2);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0] == "w3");
  CHECK(validate(p).empty());
}

TEST_CASE("gibbs kernel is u divided by lambda") {
  CHECK(gibbs_kernel(make_problem(Matrix::Zero(2, 3), 0.3, Vector::Constant(3, 1.0 / 3))).isZero());
  CHECK(gibbs_kernel(testing::symmetric_2x2()) == Matrix::Identity(2, 2));
  Matrix u(1, 2);
  u << 2, 4;
  const Matrix k = gibbs_kernel(make_problem(u, 2.0, Vector::Constant(2, 0.5)));
  CHECK(k(0, 0) == 1.0);
  CHECK(k(0, 1) == 2.0);
}

TEST_CASE("action marginal and coupling enforce their invariants") {
  Vector bad(2);
  bad << 0.7, 0.2;
  CHECK_THROWS_AS(ActionMarginal{bad}, Error);
  bad << 1.2, -0.2;
  CHECK_THROWS_AS(ActionMarginal{bad}, Error);
  CHECK(ActionMarginal::dirac(3, 1)[1] == 1.0);

  Matrix joint = Matrix::Constant(2, 2, 0.3);
  CHECK_THROWS_AS(Coupling{joint}, Error);
  joint << 0.1, 0.2, 0.3, 0.4;
  const Coupling c(joint);
  CHECK(c.action_marginal()[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.state_marginal()[1] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("mutual information closed forms") {
  Vector nu(3);
  nu << 0.2, 0.5, 0.3;
  Vector mu(2);
  mu << 0.4, 0.6;
  CHECK(mutual_information(Coupling::product(nu, mu)) == doctest::Approx(0.0).epsilon(1e-15));

  Matrix diag = Matrix::Zero(2, 2);
  diag.diagonal().setConstant(0.5);
  CHECK(std::abs(mutual_information(Coupling(diag)) - std::log(2.0)) <= 1e-15);
}

TEST_CASE("mutual information matches the frozen reference and the double-loop oracle") {
  const auto& ref = testing::derived().at("mi_3x3");
  const Matrix joint = testing::matrix_of(ref.at("joint"));
  const double expected = ref.at("mutual_information").get<double>();
  CHECK(std::abs(mutual_information(Coupling(joint)) - expected) <= 1e-12);
  CHECK(std::abs(exhaustive_mi(joint) - expected) <= 1e-12);
}

TEST_CASE("property: mutual information vanishes exactly on product couplings") {
  Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = 2 + gen.index(5);
    const Eigen::Index n = 2 + gen.index(5);
    const Vector nu = gen.simplex(m);
    const Vector mu = gen.simplex(n);
    CHECK(mutual_information(Coupling::product(nu, mu)) <= 1e-12);

    const Coupling c(gen.joint(m, n));
    const Matrix prod = c.action_marginal() * c.state_marginal().transpose();
    const double mi = mutual_information(c);
    CHECK(mi >= 0.0);
    CHECK(std::abs(mi - exhaustive_mi(c.joint())) <= 1e-12);
    if ((c.joint() - prod).cwiseAbs().maxCoeff() > 1e-10) CHECK(mi > 0.0);
  }
}

TEST_CASE("objective closed forms") {
  const Problem sym = testing::symmetric_2x2();
  const Vector half = Vector::Constant(2, 0.5);
  CHECK(std::abs(ri_objective(sym, Coupling::product(half, half)) - 0.5) <= 1e-15);

  const Problem zero = make_problem(Matrix::Zero(2, 2), 1.0, half);
  Matrix joint(2, 2);
  joint << 0.35, 0.1, 0.15, 0.4;
  CHECK(ri_objective(zero, Coupling(joint)) < 0.0);
  CHECK(std::abs(ri_objective(zero, Coupling(joint)) + mutual_information(Coupling(joint))) <= 1e-15);
}

TEST_CASE("objective rejects couplings that violate Bayes plausibility") {
  Matrix joint(2, 2);
  joint << 0.4, 0.2, 0.2, 0.2;
  CHECK_THROWS_WITH_AS(ri_objective(testing::symmetric_2x2(), Coupling(joint)),
                       doctest::Contains("BayesPlausibilityViolated"), Error);
}

TEST_CASE("objective at the symmetric optimum equals the Jensen envelope") {
  const Problem sym = testing::symmetric_2x2();
  const Solution s = solve(sym);
  CHECK(std::abs(ri_objective(sym, s.coupling) - jensen_f(sym, s.nu_star)) <= 1e-10);
  CHECK(std::abs(ri_objective(sym, s.coupling) - std::log((std::exp(1.0) + 1.0) / 2.0)) <= 1e-10);
}

TEST_CASE("property: objective is invariant under relabeling actions") {
  Gen gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 2 + gen.index(4);
    const Eigen::Index n = 2 + gen.index(4);
    const Problem p = gen.problem(m, n, gen.uniform(0.2, 3.0));
    const BridgeResult b = sinkhorn_bridge(p, ActionMarginal(gen.simplex(m)));

    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    perm.setIdentity();
    for (Eigen::Index i = m - 1; i > 0; --i) std::swap(perm.indices()[i], perm.indices()[gen.index(i + 1)]);
    Problem q = p;
    q.utility = perm * p.utility;
    const Coupling permuted(perm * b.coupling.joint());
    CHECK(std::abs(ri_objective(q, permuted) - ri_objective(p, b.coupling)) <= 1e-12);
  }
}

TEST_CASE("property: f dominates the objective for Bayes-plausible couplings") {
  Gen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = 2 + gen.index(5);
    const Eigen::Index n = 2 + gen.index(5);
    const Problem p = gen.problem(m, n, gen.uniform(0.2, 3.0));
    // Random conditional columns against the prior give a plausible joint.
    Matrix joint(m, n);
    for (Eigen::Index j = 0; j < n; ++j) joint.col(j) = gen.simplex(m) * p.prior[j];
    const Coupling c(joint);
    const ActionMarginal nu = ActionMarginal::normalized(c.action_marginal());
    CHECK(ri_objective(p, c) <= jensen_f(p, nu) + 1e-10);
  }
}

TEST_CASE("log-sum-exp is stable and skips empty mass") {
  Vector v(3);
  v << 1000.0, 1000.0, kNegInf;
  CHECK(std::abs(log_sum_exp(v) - (1000.0 + std::log(2.0))) <= 1e-12);
  v.setConstant(kNegInf);
  CHECK(log_sum_exp(v) == kNegInf);
}
