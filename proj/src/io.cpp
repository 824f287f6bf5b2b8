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

#include "ribridge/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ribridge::io {
namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Matrix& mat) {
  json out = json::array();
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

double number_of(const json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a number");
  return v.get<double>();
}

Vector vector_of(const json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number_of(v[i], what);
  return out;
}

Matrix matrix_of(const json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = rows > 0 && v[0].is_array() ? static_cast<Eigen::Index>(v[0].size()) : 0;
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::ParseError, std::string(what) + " must be a rectangular matrix");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = number_of(row[static_cast<std::size_t>(j)], what);
    }
  }
  return out;
}

std::vector<std::string> labels_of(const json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw Error(ErrorCode::ParseError, std::string(what) + " must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  }
  return doc.at(key);
}

std::string csv_label(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Problem problem_from_json(const json& doc, std::vector<std::string>* dropped_states) {
  Problem p;
  p.actions = labels_of(field(doc, "actions"), "actions");
  p.states = labels_of(field(doc, "states"), "states");
  p.utility = matrix_of(field(doc, "utility"), "utility");
  p.lambda = number_of(field(doc, "lambda"), "lambda");
  p.prior = vector_of(field(doc, "prior"), "prior");
  if (p.utility.rows() == 0 && !p.actions.empty()) {
    throw Error(ErrorCode::ParseError, "utility has no rows");
  }
  return drop_null_states(std::move(p), dropped_states);
}

json problem_to_json(const Problem& problem) {
  return json{{"actions", problem.actions},
              {"states", problem.states},
              {"utility", matrix_to_json(problem.utility)},
              {"lambda", problem.lambda},
              {"prior", vector_to_json(problem.prior)}};
}

Vector nu_from_json(const json& doc) {
  if (doc.is_object()) return vector_of(field(doc, "nu"), "nu");
  return vector_of(doc, "nu");
}

json solution_to_json(const Problem& problem, const Solution& solution) {
  json support = json::array();
  json support_labels = json::array();
  for (const auto i : solution.consideration_set) {
    support.push_back(i);
    support_labels.push_back(problem.actions[static_cast<std::size_t>(i)]);
  }
  return json{
      {"actions", problem.actions},
      {"states", problem.states},
      {"lambda", problem.lambda},
      {"nu_star", vector_to_json(solution.nu_star.weights())},
      {"consideration_set", support},
      {"consideration_labels", support_labels},
      {"f_value", solution.f_value},
      {"mutual_information", mutual_information(solution.coupling)},
      {"foc_residuals", vector_to_json(solution.foc_residuals)},
      {"coupling", matrix_to_json(solution.coupling.joint())},
      {"potentials",
       {{"a", vector_to_json(solution.potentials.a)}, {"b", vector_to_json(solution.potentials.b)}}},
      {"iterations", solution.iterations},
      {"converged", solution.converged},
      {"bridge",
       {{"residual", solution.bridge_residual},
        {"value_primal", solution.value_primal},
        {"value_dual", solution.value_dual}}},
  };
}

Solution solution_from_json(const Problem& problem, const json& doc) {
  const Vector nu = vector_of(field(doc, "nu_star"), "nu_star");
  const Matrix joint = matrix_of(field(doc, "coupling"), "coupling");
  const json& pot = field(doc, "potentials");
  const Vector a = vector_of(field(pot, "a"), "potentials.a");
  const Vector b = vector_of(field(pot, "b"), "potentials.b");
  const Vector r = vector_of(field(doc, "foc_residuals"), "foc_residuals");
  const auto m = problem.num_actions();
  const auto n = problem.num_states();
  if (nu.size() != m || joint.rows() != m || joint.cols() != n || a.size() != m || b.size() != n ||
      r.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "solution document does not match the problem");
  }
  std::vector<Eigen::Index> support;
  for (const auto& e : field(doc, "consideration_set")) support.push_back(e.get<Eigen::Index>());
  const json& bridge = field(doc, "bridge");
  return Solution{ActionMarginal(nu),
                  Coupling(joint),
                  number_of(field(doc, "f_value"), "f_value"),
                  Potentials{a, b},
                  std::move(support),
                  r,
                  field(doc, "iterations").get<std::size_t>(),
                  field(doc, "converged").get<bool>(),
                  number_of(field(bridge, "residual"), "bridge.residual"),
                  number_of(field(bridge, "value_primal"), "bridge.value_primal"),
                  number_of(field(bridge, "value_dual"), "bridge.value_dual"),
                  {}};
}

json bridge_to_json(const Problem& problem, const ActionMarginal& nu, const BridgeResult& result) {
  const auto [ra, rb] = schrodinger_residual(problem, nu, result.potentials);
  return json{
      {"actions", problem.actions},
      {"states", problem.states},
      {"nu", vector_to_json(nu.weights())},
      {"coupling", matrix_to_json(result.coupling.joint())},
      {"potentials",
       {{"a", vector_to_json(result.potentials.a)}, {"b", vector_to_json(result.potentials.b)}}},
      {"value_primal", result.value_primal},
      {"value_dual", result.value_dual},
      {"duality_gap", result.duality_gap()},
      {"additive_separability_defect", additive_separability_check(result, nu, problem.prior)},
      {"schrodinger_residual", {ra, rb}},
      {"iterations", result.iterations},
      {"residual", result.residual},
      {"converged", result.converged},
  };
}

json report_to_json(const DiagnosticReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back(json{{"name", c.name},
                          {"max_violation", c.max_violation},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"details", c.details}});
  }
  return json{{"all_pass", report.all_pass()}, {"checks", checks}};
}

std::string solution_actions_csv(const Problem& problem, const Solution& solution) {
  std::ostringstream os;
  os << "action,nu_star,a_nu,r\n";
  for (Eigen::Index i = 0; i < problem.num_actions(); ++i) {
    os << csv_label(problem.actions[static_cast<std::size_t>(i)]) << ','
       << format_double(solution.nu_star[i]) << ',' << format_double(solution.potentials.a[i])
       << ',' << format_double(solution.foc_residuals[i]) << '\n';
  }
  return os.str();
}

std::string solution_states_csv(const Problem& problem, const Solution& solution) {
  std::ostringstream os;
  os << "state,b_nu\n";
  for (Eigen::Index j = 0; j < problem.num_states(); ++j) {
    os << csv_label(problem.states[static_cast<std::size_t>(j)]) << ','
       << format_double(solution.potentials.b[j]) << '\n';
  }
  return os.str();
}

std::string report_csv(const DiagnosticReport& report) {
  std::ostringstream os;
  os << "check,max_violation,tolerance,pass\n";
  for (const auto& c : report.checks) {
    os << csv_label(c.name) << ',' << format_double(c.max_violation) << ','
       << format_double(c.tolerance) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace ribridge::io
