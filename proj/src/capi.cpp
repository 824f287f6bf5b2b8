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

#include "ribridge/ribridge.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "ribridge/bridge.hpp"
#include "ribridge/core.hpp"
#include "ribridge/diagnostics.hpp"
#include "ribridge/io.hpp"
#include "ribridge/solver.hpp"

using namespace ribridge;

struct ri_problem {
  Problem problem;
  std::vector<std::string> dropped;
};

struct ri_solution {
  Problem problem;
  Solution solution;
};

struct ri_bridge {
  Problem problem;
  ActionMarginal nu;
  BridgeResult result;
};

struct ri_report {
  DiagnosticReport report;
};

namespace {

thread_local std::string g_last_error;

ri_status fail(ri_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

ri_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveLambda:
    case ErrorCode::PriorNotSimplex:
    case ErrorCode::NonFiniteUtility:
    case ErrorCode::EmptyActionSet:
    case ErrorCode::EmptyStateSet:
      return RI_VALIDATION_ERROR;
    case ErrorCode::DimensionMismatch:
      return RI_DIMENSION_MISMATCH;
    case ErrorCode::ParseError:
      return RI_PARSE_ERROR;
    default:
      return RI_INVALID_ARGUMENT;
  }
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
ri_status guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RI_PARSE_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RI_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(RI_IO_ERROR, e.what());
  }
}

ri_status finish_problem(Problem problem, std::vector<std::string> dropped, ri_problem** out) {
  const auto issues = validate(problem);
  if (!issues.empty()) {
    std::string msg;
    for (const auto& issue : issues) {
      if (!msg.empty()) msg += "; ";
      msg += std::string(to_string(issue.code)) + ": " + issue.message;
    }
    return fail(RI_VALIDATION_ERROR, msg);
  }
  *out = new ri_problem{std::move(problem), std::move(dropped)};
  return RI_OK;
}

size_t copy_out(const double* data, size_t count, double* out, size_t len) {
  if (out != nullptr) std::copy_n(data, std::min(count, len), out);
  return count;
}

SinkhornConfig to_cpp(const ri_sinkhorn_config* cfg) {
  SinkhornConfig c;
  if (cfg != nullptr) {
    c.tolerance = cfg->tolerance;
    c.max_iterations = cfg->max_iterations;
    c.log_domain = cfg->log_domain != 0;
  }
  return c;
}

SolverConfig to_cpp(const ri_solver_config* cfg) {
  SolverConfig c;
  if (cfg != nullptr) {
    c.f_tolerance = cfg->f_tolerance;
    c.foc_tolerance = cfg->foc_tolerance;
    c.support_threshold = cfg->support_threshold;
    c.max_iterations = cfg->max_iterations;
    c.init = cfg->init == RI_INIT_RANDOM ? InitKind::Random : InitKind::Uniform;
    c.seed = cfg->seed;
    c.sinkhorn = to_cpp(&cfg->sinkhorn);
  }
  return c;
}

ri_status bridge_from_vector(const ri_problem* problem, Vector nu, const ri_sinkhorn_config* cfg,
                             ri_bridge** out) {
  if (nu.size() != problem->problem.num_actions()) {
    return fail(RI_DIMENSION_MISMATCH, "nu has " + std::to_string(nu.size()) +
                                           " entries but the problem has " +
                                           std::to_string(problem->problem.num_actions()) +
                                           " actions");
  }
  ActionMarginal marginal(std::move(nu));
  BridgeResult result = sinkhorn_bridge(problem->problem, marginal, to_cpp(cfg));
  const bool converged = result.converged;
  *out = new ri_bridge{problem->problem, std::move(marginal), std::move(result)};
  if (!converged) return fail(RI_NOT_CONVERGED, "Sinkhorn scaling did not reach the tolerance");
  return RI_OK;
}

}  // namespace

extern "C" {

const char* ri_version(void) { return "1.0.0"; }

const char* ri_last_error(void) { return g_last_error.c_str(); }

const char* ri_status_name(ri_status status) {
  switch (status) {
    case RI_OK: return "ok";
    case RI_INVALID_ARGUMENT: return "invalid argument";
    case RI_VALIDATION_ERROR: return "validation error";
    case RI_NOT_CONVERGED: return "not converged";
    case RI_DIMENSION_MISMATCH: return "dimension mismatch";
    case RI_PARSE_ERROR: return "parse error";
    case RI_IO_ERROR: return "i/o error";
    case RI_INTERNAL_ERROR: return "internal error";
  }
  return "unknown";
}

void ri_sinkhorn_config_default(ri_sinkhorn_config* cfg) {
  if (cfg == nullptr) return;
  const SinkhornConfig d;
  cfg->tolerance = d.tolerance;
  cfg->max_iterations = d.max_iterations;
  cfg->log_domain = d.log_domain ? 1 : 0;
}

void ri_solver_config_default(ri_solver_config* cfg) {
  if (cfg == nullptr) return;
  const SolverConfig d;
  cfg->f_tolerance = d.f_tolerance;
  cfg->foc_tolerance = d.foc_tolerance;
  cfg->support_threshold = d.support_threshold;
  cfg->max_iterations = d.max_iterations;
  cfg->init = RI_INIT_UNIFORM;
  cfg->seed = d.seed;
  ri_sinkhorn_config_default(&cfg->sinkhorn);
}

ri_status ri_problem_load(const char* path, ri_problem** out) {
  if (path == nullptr || out == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    std::vector<std::string> dropped;
    Problem p = io::problem_from_json(io::read_json_file(path), &dropped);
    return finish_problem(std::move(p), std::move(dropped), out);
  });
}

ri_status ri_problem_parse(const char* json_text, ri_problem** out) {
  if (json_text == nullptr || out == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    std::vector<std::string> dropped;
    Problem p = io::problem_from_json(io::json::parse(json_text), &dropped);
    return finish_problem(std::move(p), std::move(dropped), out);
  });
}

ri_status ri_problem_create(size_t m, size_t n, const double* utility, double lambda,
                            const double* prior, ri_problem** out) {
  if (utility == nullptr || prior == nullptr || out == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guard([&] {
    const auto rows = static_cast<Eigen::Index>(m);
    const auto cols = static_cast<Eigen::Index>(n);
    Matrix u = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        utility, rows, cols);
    Vector mu = Eigen::Map<const Vector>(prior, cols);
    std::vector<std::string> dropped;
    Problem p = drop_null_states(make_problem(std::move(u), lambda, std::move(mu)), &dropped);
    return finish_problem(std::move(p), std::move(dropped), out);
  });
}

ri_status ri_problem_with_lambda(const ri_problem* problem, double lambda, ri_problem** out) {
  if (problem == nullptr || out == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    Problem p = problem->problem;
    p.lambda = lambda;
    return finish_problem(std::move(p), problem->dropped, out);
  });
}

void ri_problem_free(ri_problem* problem) { delete problem; }

size_t ri_problem_num_actions(const ri_problem* problem) {
  return problem ? static_cast<size_t>(problem->problem.num_actions()) : 0;
}

size_t ri_problem_num_states(const ri_problem* problem) {
  return problem ? static_cast<size_t>(problem->problem.num_states()) : 0;
}

double ri_problem_lambda(const ri_problem* problem) {
  return problem ? problem->problem.lambda : 0.0;
}

size_t ri_problem_num_dropped_states(const ri_problem* problem) {
  return problem ? problem->dropped.size() : 0;
}

const char* ri_problem_dropped_state(const ri_problem* problem, size_t index) {
  if (problem == nullptr || index >= problem->dropped.size()) return nullptr;
  return problem->dropped[index].c_str();
}

ri_status ri_solve(const ri_problem* problem, const ri_solver_config* cfg, ri_solution** out) {
  if (problem == nullptr || out == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    Solution s = solve(problem->problem, to_cpp(cfg));
    const bool converged = s.converged;
    const auto iterations = s.iterations;
    *out = new ri_solution{problem->problem, std::move(s)};
    if (!converged) {
      return fail(RI_NOT_CONVERGED, "solver stopped after " + std::to_string(iterations) +
                                        " iterations without certifying the plateau conditions");
    }
    return RI_OK;
  });
}

void ri_solution_free(ri_solution* solution) { delete solution; }

size_t ri_solution_nu(const ri_solution* solution, double* out, size_t len) {
  const Vector& v = solution->solution.nu_star.weights();
  return copy_out(v.data(), static_cast<size_t>(v.size()), out, len);
}

size_t ri_solution_coupling(const ri_solution* solution, double* out, size_t len) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm =
      solution->solution.coupling.joint();
  return copy_out(rm.data(), static_cast<size_t>(rm.size()), out, len);
}

size_t ri_solution_foc_residuals(const ri_solution* solution, double* out, size_t len) {
  const Vector& v = solution->solution.foc_residuals;
  return copy_out(v.data(), static_cast<size_t>(v.size()), out, len);
}

size_t ri_solution_log_partition(const ri_solution* solution, double* out, size_t len) {
  const Vector z = partition_function(solution->problem, solution->solution.nu_star);
  return copy_out(z.data(), static_cast<size_t>(z.size()), out, len);
}

double ri_solution_f_value(const ri_solution* solution) { return solution->solution.f_value; }

double ri_solution_mutual_information(const ri_solution* solution) {
  return mutual_information(solution->solution.coupling);
}

size_t ri_solution_consideration_size(const ri_solution* solution) {
  return solution->solution.consideration_set.size();
}

size_t ri_solution_iterations(const ri_solution* solution) { return solution->solution.iterations; }

int ri_solution_converged(const ri_solution* solution) {
  return solution->solution.converged ? 1 : 0;
}

ri_status ri_solution_write_json(const ri_solution* solution, const char* path) {
  if (solution == nullptr || path == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    io::write_text_file(path, io::solution_to_json(solution->problem, solution->solution).dump(2) + "\n");
    return RI_OK;
  });
}

ri_status ri_solution_write_csv(const ri_solution* solution, const char* actions_path,
                                const char* states_path) {
  if (solution == nullptr || actions_path == nullptr || states_path == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  return guard([&] {
    io::write_text_file(actions_path, io::solution_actions_csv(solution->problem, solution->solution));
    io::write_text_file(states_path, io::solution_states_csv(solution->problem, solution->solution));
    return RI_OK;
  });
}

ri_status ri_solution_load(const ri_problem* problem, const char* path, ri_solution** out) {
  if (problem == nullptr || path == nullptr || out == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guard([&] {
    Solution s = io::solution_from_json(problem->problem, io::read_json_file(path));
    *out = new ri_solution{problem->problem, std::move(s)};
    return RI_OK;
  });
}

ri_status ri_bridge_solve(const ri_problem* problem, const double* nu, size_t len,
                          const ri_sinkhorn_config* cfg, ri_bridge** out) {
  if (problem == nullptr || nu == nullptr || out == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guard([&] {
    return bridge_from_vector(problem, Eigen::Map<const Vector>(nu, static_cast<Eigen::Index>(len)),
                              cfg, out);
  });
}

ri_status ri_bridge_solve_file(const ri_problem* problem, const char* nu_path,
                               const ri_sinkhorn_config* cfg, ri_bridge** out) {
  if (problem == nullptr || nu_path == nullptr || out == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guard([&] {
    return bridge_from_vector(problem, io::nu_from_json(io::read_json_file(nu_path)), cfg, out);
  });
}

void ri_bridge_free(ri_bridge* bridge) { delete bridge; }
double ri_bridge_value_primal(const ri_bridge* bridge) { return bridge->result.value_primal; }
double ri_bridge_value_dual(const ri_bridge* bridge) { return bridge->result.value_dual; }
double ri_bridge_duality_gap(const ri_bridge* bridge) { return bridge->result.duality_gap(); }
double ri_bridge_residual(const ri_bridge* bridge) { return bridge->result.residual; }
size_t ri_bridge_iterations(const ri_bridge* bridge) { return bridge->result.iterations; }

size_t ri_bridge_coupling(const ri_bridge* bridge, double* out, size_t len) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm =
      bridge->result.coupling.joint();
  return copy_out(rm.data(), static_cast<size_t>(rm.size()), out, len);
}

ri_status ri_bridge_write_json(const ri_bridge* bridge, const char* path) {
  if (bridge == nullptr || path == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    io::write_text_file(path,
                        io::bridge_to_json(bridge->problem, bridge->nu, bridge->result).dump(2) + "\n");
    return RI_OK;
  });
}

ri_status ri_diagnose(const ri_problem* problem, const ri_solution* solution, uint64_t seed,
                      ri_report** out) {
  if (problem == nullptr || solution == nullptr || out == nullptr) {
    return fail(RI_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guard([&] {
    DiagnoseConfig cfg;
    cfg.seed = seed;
    *out = new ri_report{diagnose(problem->problem, solution->solution, cfg)};
    return RI_OK;
  });
}

void ri_report_free(ri_report* report) { delete report; }

int ri_report_all_pass(const ri_report* report) { return report->report.all_pass() ? 1 : 0; }

size_t ri_report_num_checks(const ri_report* report) { return report->report.checks.size(); }

ri_status ri_report_check(const ri_report* report, size_t index, ri_check* out) {
  if (report == nullptr || out == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  if (index >= report->report.checks.size()) return fail(RI_INVALID_ARGUMENT, "index out of range");
  const CheckResult& c = report->report.checks[index];
  out->name = c.name.c_str();
  out->max_violation = c.max_violation;
  out->tolerance = c.tolerance;
  out->pass = c.pass ? 1 : 0;
  out->details = c.details.c_str();
  return RI_OK;
}

ri_status ri_report_write_json(const ri_report* report, const char* path) {
  if (report == nullptr || path == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    io::write_text_file(path, io::report_to_json(report->report).dump(2) + "\n");
    return RI_OK;
  });
}

ri_status ri_report_write_csv(const ri_report* report, const char* path) {
  if (report == nullptr || path == nullptr) return fail(RI_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    io::write_text_file(path, io::report_csv(report->report));
    return RI_OK;
  });
}

}  // extern "C"
