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
#include "ribridge/diagnostics.hpp"
#include "ribridge/solver.hpp"
#include "support.hpp"

using namespace ribridge;
using ribridge::testing::Gen;

namespace {

const double kE = std::exp(1.0);
const double kSymF = std::log((kE + 1.0) / 2.0);

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

TEST_CASE("jensen envelope closed forms") {
  Gen gen(31);
  const Problem zero = make_problem(Matrix::Zero(3, 2), 0.7, gen.simplex(2));
  CHECK(jensen_f(zero, ActionMarginal(gen.simplex(3))) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(jensen_f(testing::symmetric_2x2(), ActionMarginal::uniform(2)) - kSymF) <= 1e-15);
  CHECK(std::abs(jensen_f(testing::state_independent(), ActionMarginal::dirac(2, 0)) - 2.0) <= 1e-15);
}

TEST_CASE("partition function closed forms and frozen reference") {
  const Problem zero = make_problem(Matrix::Zero(2, 3), 1.0, Vector::Constant(3, 1.0 / 3));
  CHECK(partition_function(zero, ActionMarginal::uniform(2)).cwiseAbs().maxCoeff() <= 1e-15);
  const Vector z = partition_function(testing::symmetric_2x2(), ActionMarginal::uniform(2));
  CHECK(std::abs(z[0] - kSymF) <= 1e-15);
  CHECK(std::abs(z[1] - kSymF) <= 1e-15);

  const auto& ref = testing::derived().at("log_partition_4x6");
  const Problem p = testing::problem_of(ref.at("problem"));
  const ActionMarginal nu = ActionMarginal::normalized(testing::vector_of(ref.at("nu")));
  const Vector expected = testing::vector_of(ref.at("log_z"));
  const Vector got = partition_function(p, nu);
  for (Eigen::Index j = 0; j < got.size(); ++j) {
    CHECK(std::abs(std::exp(got[j]) / std::exp(expected[j]) - 1.0) <= 1e-12);
  }
  CHECK(std::abs(jensen_f(p, nu) - ref.at("f").get<double>()) <= 1e-12);
  const Vector a = action_potential_candidate(p, nu);
  CHECK((a - testing::vector_of(ref.at("a"))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("first-order residuals and action potentials in closed form") {
  const Vector r = foc_residuals(testing::symmetric_2x2(), ActionMarginal::uniform(2));
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(action_potential_candidate(testing::symmetric_2x2(), ActionMarginal::uniform(2))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  const ActionMarginal delta = ActionMarginal::dirac(2, 0);
  const Vector rs = foc_residuals(testing::state_independent(), delta);
  CHECK(std::abs(rs[0]) <= 1e-15);
  CHECK(std::abs(rs[1] - (1.0 / kE - 1.0)) <= 1e-15);
  const Vector as = action_potential_candidate(testing::state_independent(), delta);
  CHECK(std::abs(as[0]) <= 1e-15);
  CHECK(std::abs(as[1] + 1.0) <= 1e-15);
}

TEST_CASE("property: action potentials and residuals agree in sign") {
  Gen gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + gen.index(8);
    const Problem p = gen.problem(m, 2 + gen.index(8), gen.uniform(0.2, 4.0));
    const ActionMarginal nu(gen.simplex(m));
    const Vector a = action_potential_candidate(p, nu);
    const Vector r = foc_residuals(p, nu);
    for (Eigen::Index i = 0; i < m; ++i) CHECK(sign_of(a[i]) == sign_of(r[i]));
  }
}

TEST_CASE("blahut-arimoto step closed forms") {
  const ActionMarginal u2 = ActionMarginal::uniform(2);
  CHECK((ba_step(testing::symmetric_2x2(), u2).weights() - u2.weights()).cwiseAbs().maxCoeff() <= 1e-14);
  const ActionMarginal next = ba_step(testing::state_independent(), u2);
  CHECK(std::abs(next[0] - kE / (kE + 1.0)) <= 1e-15);
  CHECK(std::abs(next.weights().sum() - 1.0) <= 1e-12);
}

TEST_CASE("blahut-arimoto trajectory matches the frozen reference") {
  const auto& ref = testing::derived().at("ba_trajectory_4x3");
  const Problem p = testing::problem_of(ref.at("problem"));
  const auto& f = ref.at("f");
  ActionMarginal nu = ActionMarginal::uniform(4);
  double prev = jensen_f(p, nu);
  CHECK(std::abs(prev - f[0].get<double>()) <= 1e-12);
  for (std::size_t k = 1; k < f.size(); ++k) {
    nu = ba_step(p, nu);
    const double cur = jensen_f(p, nu);
    CHECK(cur >= prev - 1e-12);
    CHECK(std::abs(cur - f[k].get<double>()) <= 1e-11);
    prev = cur;
  }
  CHECK((nu.weights() - testing::vector_of(ref.at("nu_50"))).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("property: blahut-arimoto never lowers the Jensen envelope") {
  Gen gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + gen.index(10);
    const Problem p = gen.problem(m, 2 + gen.index(10), gen.uniform(0.2, 4.0));
    const ActionMarginal nu(gen.simplex(m));
    CHECK(jensen_f(p, ba_step(p, nu)) >= jensen_f(p, nu) - 1e-12);
  }
}

TEST_CASE("property: fixed points of the update are exactly the plateau points") {
  Gen gen(34);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 2 + gen.index(5);
    const Problem p = gen.problem(m, 2 + gen.index(5), gen.uniform(0.3, 3.0));
    const Solution s = solve(p);
    REQUIRE(s.converged);
    const ActionMarginal& nu = s.nu_star;
    const ActionMarginal next = ba_step(p, nu);
    const Vector r = foc_residuals(p, nu);
    double step = 0.0;
    double plateau = 0.0;
    for (const auto i : s.consideration_set) {
      step = std::max(step, std::abs(next[i] - nu[i]));
      plateau = std::max(plateau, std::abs(r[i]));
    }
    CHECK(step <= 1e-12);
    CHECK(plateau <= 1e-10);

    // Away from the optimum both fail together.
    const ActionMarginal off(gen.simplex(m));
    const ActionMarginal moved = ba_step(p, off);
    const double off_step = (moved.weights() - off.weights()).cwiseAbs().maxCoeff();
    const double off_plateau = foc_residuals(p, off).cwiseAbs().maxCoeff();
    CHECK((off_step <= 1e-12) == (off_plateau <= 1e-10));
  }
}

TEST_CASE("property: the Jensen envelope is concave") {
  Gen gen(35);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 2 + gen.index(8);
    const Problem p = gen.problem(m, 2 + gen.index(8), gen.uniform(0.2, 4.0));
    const Vector x = gen.simplex(m);
    const Vector y = gen.simplex(m);
    const double beta = gen.uniform(0.01, 0.99);
    const double mid = jensen_f(p, ActionMarginal::normalized(beta * x + (1.0 - beta) * y));
    CHECK(mid >= beta * jensen_f(p, ActionMarginal(x)) + (1.0 - beta) * jensen_f(p, ActionMarginal(y)) - 1e-10);
  }
}

TEST_CASE("property: f dominates the bridge value and meets it at the optimum") {
  Gen gen(36);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index m = 2 + gen.index(5);
    const Problem p = gen.problem(m, 2 + gen.index(5), gen.uniform(0.25, 4.0));
    for (int k = 0; k < 10; ++k) {
      const ActionMarginal nu(gen.simplex(m));
      CHECK(jensen_f(p, nu) >= sinkhorn_bridge(p, nu).value_primal - 1e-8);
    }
    const Solution s = solve(p);
    CHECK(std::abs(s.f_value - s.value_primal) <= 1e-6);
  }
}

TEST_CASE("property: the solved marginal maximizes the bridge value") {
  Gen gen(37);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Index m = 2 + gen.index(4);
    const Problem p = gen.problem(m, 2 + gen.index(4), gen.uniform(0.25, 4.0));
    const Solution s = solve(p);
    for (int k = 0; k < 100; ++k) {
      const ActionMarginal nu(gen.simplex(m));
      CHECK(s.value_primal >= sinkhorn_bridge(p, nu).value_primal - 1e-6);
    }
  }
}

TEST_CASE("solve: state-independent utility picks the best action") {
  const Problem p = testing::state_independent();
  const Solution s = solve(p);
  CHECK(s.converged);
  CHECK(s.nu_star[1] < 1e-9);
  CHECK(std::abs(s.f_value - 2.0) <= 1e-10);
  CHECK(mutual_information(s.coupling) <= 1e-10);
  CHECK(s.consideration_set == std::vector<Eigen::Index>{0});
  CHECK(std::abs(s.coupling.joint()(0, 0) - 0.5) <= 1e-9);
  CHECK(std::abs(s.coupling.joint()(0, 1) - 0.5) <= 1e-9);
  CHECK(std::abs(s.foc_residuals[1] - (1.0 / kE - 1.0)) <= 1e-8);
}

TEST_CASE("solve: symmetric matching from any interior start") {
  Gen gen(38);
  for (int trial = 0; trial < 10; ++trial) {
    SolverConfig cfg;
    cfg.init = InitKind::Custom;
    cfg.custom_init = ActionMarginal(gen.simplex(2));
    const Solution s = solve(testing::symmetric_2x2(), cfg);
    CHECK(s.converged);
    CHECK(std::abs(s.nu_star[0] - 0.5) <= 1e-9);
    const Matrix cond = s.coupling.joint() * 2.0;
    CHECK(std::abs(cond(0, 0) - kE / (1.0 + kE)) <= 1e-9);
    CHECK(std::abs(s.f_value - kSymF) <= 1e-10);
  }
}

TEST_CASE("solve matches frozen high-precision optima") {
  for (const auto& ref : testing::derived().at("solved_3x3")) {
    const Problem p = testing::problem_of(ref.at("problem"));
    const Solution s = solve(p);
    CHECK(s.converged);
    CHECK(std::abs(s.f_value - ref.at("f_star").get<double>()) <= 1e-10);
  }
  const auto& dom = testing::derived().at("dominated_3x3");
  const Solution s = solve(testing::problem_of(dom.at("problem")));
  CHECK(std::abs(s.f_value - dom.at("f_star").get<double>()) <= 1e-10);
  CHECK(s.consideration_set == std::vector<Eigen::Index>{0, 1});
}

TEST_CASE("solve: iteration cap reports the best iterate") {
  Gen gen(39);
  const Problem p = gen.problem(4, 4, 0.5);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  const Solution s = solve(p, cfg);
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 1);
  CHECK(s.coupling.joint().allFinite());
  CHECK(s.foc_residuals.allFinite());
}

TEST_CASE("solve: config validation") {
  SolverConfig cfg;
  cfg.foc_tolerance = 0.0;
  CHECK_THROWS_AS(solve(testing::symmetric_2x2(), cfg), Error);
  cfg = {};
  cfg.init = InitKind::Custom;
  CHECK_THROWS_AS(solve(testing::symmetric_2x2(), cfg), Error);
  Problem bad = testing::symmetric_2x2();
  bad.lambda = 0.0;
  CHECK_THROWS_WITH_AS(solve(bad), doctest::Contains("NonPositiveLambda"), Error);
}

TEST_CASE("solve: random initialization is reproducible per seed") {
  Gen gen(40);
  const Problem p = gen.problem(5, 5, 0.7);
  SolverConfig cfg;
  cfg.init = InitKind::Random;
  cfg.seed = 99;
  const Solution a = solve(p, cfg);
  const Solution b = solve(p, cfg);
  CHECK(a.nu_star.weights() == b.nu_star.weights());
  CHECK(a.f_value == b.f_value);
}

TEST_CASE("property: duplicated actions leave the partition function unique") {
  Gen gen(41);
  for (int trial = 0; trial < 5; ++trial) {
    Problem p = gen.problem(4, 4, gen.uniform(0.3, 1.5));
    p.utility.row(3) = p.utility.row(1);
    std::vector<Vector> zs;
    std::vector<Vector> nus;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SolverConfig cfg;
      cfg.init = InitKind::Random;
      cfg.seed = seed;
      const Solution s = solve(p, cfg);
      CHECK(s.converged);
      zs.push_back(partition_function(p, s.nu_star).array().exp().matrix());
      nus.push_back(s.nu_star.weights());
    }
    for (std::size_t x = 0; x < zs.size(); ++x) {
      for (std::size_t y = x + 1; y < zs.size(); ++y) {
        CHECK((zs[x] - zs[y]).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
  }
}

TEST_CASE("logit policy") {
  Gen gen(42);
  Vector mu = gen.simplex(3);
  const Problem zero = make_problem(Matrix::Zero(2, 3), 1.0, mu);
  Vector w(2);
  w << 0.3, 0.7;
  const Matrix pz = logit_policy(zero, ActionMarginal(w));
  for (Eigen::Index j = 0; j < 3; ++j) CHECK((pz.col(j) - w).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(std::abs(logit_policy(testing::symmetric_2x2(), ActionMarginal::uniform(2))(0, 0) -
                 kE / (1.0 + kE)) <= 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 2 + gen.index(6);
    const Problem p = gen.problem(m, 2 + gen.index(6), gen.uniform(0.25, 4.0));
    const Solution s = solve(p);
    const Matrix policy = logit_policy(p, s.nu_star);
    CHECK((policy.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    const Vector rows = policy * p.prior;
    CHECK((rows - s.nu_star.weights()).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("property: solved couplings are Gibbs plateaus") {
  Gen gen(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 2 + gen.index(8);
    const Problem p = gen.problem(m, 2 + gen.index(8), gen.uniform(0.25, 4.0));
    const Solution s = solve(p);
    REQUIRE(s.converged);
    CHECK(gibbs_plateau_check(p, s).pass);
    CHECK(kt_check(p, s).pass);
    CHECK(std::abs(s.f_value - ri_objective(p, s.coupling)) <= 1e-6);
    CHECK(satisfies_plateau(s.nu_star.weights(), s.foc_residuals, 1e-7, 1e-9));
  }
}
