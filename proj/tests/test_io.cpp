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

#include "ribridge/diagnostics.hpp"
#include "ribridge/io.hpp"
#include "ribridge/solver.hpp"
#include "support.hpp"

using namespace ribridge;
using ribridge::testing::Gen;

TEST_CASE("problem documents load with the exact schema") {
  const Problem p = io::problem_from_json(io::read_json_file(testing::fixture("symmetric_2x2.json")));
  CHECK(validate(p).empty());
  CHECK(p.actions == std::vector<std::string>{"match_w1", "match_w2"});
  CHECK(p.states == std::vector<std::string>{"w1", "w2"});
  CHECK(p.utility == Matrix::Identity(2, 2));
  CHECK(p.lambda == 1.0);

  const io::json back = io::problem_to_json(p);
  const Problem again = io::problem_from_json(back);
  CHECK(again.utility == p.utility);
  CHECK(again.prior == p.prior);
  CHECK(again.actions == p.actions);
}

TEST_CASE("malformed problem documents are parse errors") {
  auto code_of = [](const char* text) {
    try {
      io::problem_from_json(io::json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidConfig;
  };
  CHECK(code_of(R"({"actions":["a"],"states":["w"],"utility":[[1]],"prior":[1]})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"actions":["a"],"states":["w"],"utility":[[1]],"lambda":"x","prior":[1]})") ==
        ErrorCode::ParseError);
  CHECK(code_of(R"({"actions":["a","b"],"states":["w","v"],"utility":[[1,2],[3]],"lambda":1,"prior":[0.5,0.5]})") ==
        ErrorCode::ParseError);
  CHECK_THROWS_AS(io::read_json_file(testing::fixture("does_not_exist.json")), Error);
}

TEST_CASE("label and dimension mismatches are reported by validation") {
  const Problem p = io::problem_from_json(io::json::parse(
      R"({"actions":["a"],"states":["w","v"],"utility":[[1,2],[3,4]],"lambda":1,"prior":[0.5,0.5]})"));
  bool mismatch = false;
  for (const auto& issue : validate(p)) mismatch = mismatch || issue.code == ErrorCode::DimensionMismatch;
  CHECK(mismatch);
}

TEST_CASE("marginal documents accept arrays and objects") {
  CHECK(io::nu_from_json(io::json::parse("[0.25, 0.75]"))[1] == 0.75);
  CHECK(io::nu_from_json(io::json::parse(R"({"nu": [0.5, 0.5]})"))[0] == 0.5);
  CHECK_THROWS_AS(io::nu_from_json(io::json::parse(R"({"weights": [1]})")), Error);
}

TEST_CASE("doubles serialize at round-trip precision") {
  Gen gen(81);
  for (int i = 0; i < 1000; ++i) {
    const double x = gen.uniform(-1e3, 1e3) * std::pow(10.0, gen.uniform(-20, 20));
    CHECK(std::stod(io::format_double(x)) == x);
  }
}

TEST_CASE("solution documents round-trip exactly") {
  const Problem p = testing::problem_of(io::read_json_file(testing::fixture("random_4x4.json")));
  const Solution s = solve(p);
  const std::string text = io::solution_to_json(p, s).dump();
  const Solution back = io::solution_from_json(p, io::json::parse(text));
  CHECK(back.nu_star.weights() == s.nu_star.weights());
  CHECK(back.coupling.joint() == s.coupling.joint());
  CHECK(back.potentials.a == s.potentials.a);
  CHECK(back.potentials.b == s.potentials.b);
  CHECK(back.foc_residuals == s.foc_residuals);
  CHECK(back.f_value == s.f_value);
  CHECK(back.consideration_set == s.consideration_set);
  CHECK(back.converged == s.converged);

  const DiagnosticReport original = diagnose(p, s);
  const DiagnosticReport reread = diagnose(p, back);
  REQUIRE(original.checks.size() == reread.checks.size());
  for (std::size_t i = 0; i < original.checks.size(); ++i) {
    CHECK(original.checks[i].max_violation == reread.checks[i].max_violation);
  }
}

TEST_CASE("solution documents must match the problem") {
  const Problem p = testing::problem_of(io::read_json_file(testing::fixture("random_4x4.json")));
  const io::json doc = io::solution_to_json(p, solve(p));
  CHECK_THROWS_WITH_AS(io::solution_from_json(testing::symmetric_2x2(), doc),
                       doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("csv layouts") {
  const Problem p = io::problem_from_json(io::read_json_file(testing::fixture("symmetric_2x2.json")));
  const Solution s = solve(p);
  const std::string actions = io::solution_actions_csv(p, s);
  CHECK(actions.rfind("action,nu_star,a_nu,r\nmatch_w1,0.5", 0) == 0);
  CHECK(io::solution_states_csv(p, s).rfind("state,b_nu\nw1,", 0) == 0);
  const std::string report = io::report_csv(diagnose(p, s));
  CHECK(report.rfind("check,max_violation,tolerance,pass\n", 0) == 0);
  CHECK(report.find(",false\n") == std::string::npos);
}

TEST_CASE("csv output is byte-identical across runs") {
  const Problem p = testing::problem_of(io::read_json_file(testing::fixture("random_4x4.json")));
  SolverConfig cfg;
  cfg.init = InitKind::Random;
  cfg.seed = 5;
  const Solution a = solve(p, cfg);
  const Solution b = solve(p, cfg);
  CHECK(io::solution_actions_csv(p, a) == io::solution_actions_csv(p, b));
  CHECK(io::solution_states_csv(p, a) == io::solution_states_csv(p, b));
  CHECK(io::report_csv(diagnose(p, a)) == io::report_csv(diagnose(p, b)));
}
