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

// JSON documents and flat CSV tables. Doubles are written with 17
// significant digits so that re-read values are bit-identical.

#ifndef RIBRIDGE_IO_HPP_
#define RIBRIDGE_IO_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "ribridge/bridge.hpp"
#include "ribridge/core.hpp"
#include "ribridge/diagnostics.hpp"
#include "ribridge/solver.hpp"

namespace ribridge::io {

using json = nlohmann::json;

/// Reads {"actions", "states", "utility", "lambda", "prior"}. Zero-prior
/// states are dropped and reported through `dropped_states`. The result is
/// not validated. Throws ParseError on malformed input.
Problem problem_from_json(const json& doc, std::vector<std::string>* dropped_states = nullptr);
json problem_to_json(const Problem& problem);

/// Accepts a bare array or {"nu": [...]}.
Vector nu_from_json(const json& doc);

json solution_to_json(const Problem& problem, const Solution& solution);
/// Throws DimensionMismatch when the document does not fit `problem`.
Solution solution_from_json(const Problem& problem, const json& doc);

json bridge_to_json(const Problem& problem, const ActionMarginal& nu, const BridgeResult& result);

json report_to_json(const DiagnosticReport& report);

/// action,nu_star,a_nu,r
std::string solution_actions_csv(const Problem& problem, const Solution& solution);
/// state,b_nu
std::string solution_states_csv(const Problem& problem, const Solution& solution);
/// check,max_violation,tolerance,pass
std::string report_csv(const DiagnosticReport& report);

/// %.17g
std::string format_double(double x);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ribridge::io

#endif  // RIBRIDGE_IO_HPP_
