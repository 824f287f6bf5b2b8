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

// ribridge-cli: solve, bridge, diagnose and sweep rational-inattention
// problems from the command line.
//
// Exit codes: 0 ok, 1 invalid input, 2 not converged (or, for diagnose,
// at least one failing check). Output files are written in both 0 and 2.

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ribridge/ribridge.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct ProblemDeleter {
  void operator()(ri_problem* p) const { ri_problem_free(p); }
};
struct SolutionDeleter {
  void operator()(ri_solution* s) const { ri_solution_free(s); }
};
struct BridgeDeleter {
  void operator()(ri_bridge* b) const { ri_bridge_free(b); }
};
struct ReportDeleter {
  void operator()(ri_report* r) const { ri_report_free(r); }
};
using ProblemPtr = std::unique_ptr<ri_problem, ProblemDeleter>;
using SolutionPtr = std::unique_ptr<ri_solution, SolutionDeleter>;
using BridgePtr = std::unique_ptr<ri_bridge, BridgeDeleter>;
using ReportPtr = std::unique_ptr<ri_report, ReportDeleter>;

struct Options {
  std::string output_dir = ".";
  double tolerance = 0.0;
  std::size_t max_iters = 0;
  double foc_tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string init = "uniform";
  unsigned jobs = 1;
};

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

// Collects what a command read and wrote; serialized as manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, const CLI::App& sub) : command_(std::move(command)) {
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->count() == 0 || opt->get_name().empty() || opt->get_name() == "--help") continue;
      if (opt->get_positional()) continue;
      std::string value;
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      overrides_[opt->get_name()] = value;
    }
  }

  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const std::string& path) { outputs_.push_back(path); }

  std::string write(const std::string& dir, double wall_seconds) const {
    json outs = json::array();
    for (const auto& p : outputs_) {
      outs.push_back(json{{"path", p}, {"sha256", sha256_file(p)}});
    }
    const json doc{{"command", command_},
                   {"inputs", inputs_},
                   {"overrides", overrides_},
                   {"outputs", outs},
                   {"wall_time_seconds", wall_seconds}};
    const std::string path = (fs::path(dir) / "manifest.json").string();
    std::ofstream(path) << doc.dump(2) << '\n';
    return path;
  }

 private:
  std::string command_;
  std::vector<std::string> inputs_;
  std::map<std::string, std::string> overrides_;
  std::vector<std::string> outputs_;
};

int report_error(ri_status status) {
  std::cerr << "error: " << ri_status_name(status);
  const std::string detail = ri_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << '\n';
  return status == RI_NOT_CONVERGED ? kExitNotConverged : kExitInvalid;
}

ri_solver_config solver_config(const Options& opt, const CLI::App& sub) {
  ri_solver_config cfg;
  ri_solver_config_default(&cfg);
  if (sub.count("--tolerance")) cfg.sinkhorn.tolerance = opt.tolerance;
  if (sub.count("--max-iters")) cfg.max_iterations = opt.max_iters;
  if (sub.count("--foc-tolerance")) cfg.foc_tolerance = opt.foc_tolerance;
  cfg.seed = opt.seed;
  cfg.init = opt.init == "random" ? RI_INIT_RANDOM : RI_INIT_UNIFORM;
  return cfg;
}

ri_sinkhorn_config sinkhorn_config(const Options& opt, const CLI::App& sub) {
  ri_sinkhorn_config cfg;
  ri_sinkhorn_config_default(&cfg);
  if (sub.count("--tolerance")) cfg.tolerance = opt.tolerance;
  if (sub.count("--max-iters")) cfg.max_iterations = opt.max_iters;
  return cfg;
}

std::string out_path(const Options& opt, const std::string& name) {
  return (fs::path(opt.output_dir) / name).string();
}

bool prepare_output_dir(const Options& opt) {
  std::error_code ec;
  fs::create_directories(opt.output_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << opt.output_dir << ": " << ec.message() << '\n';
    return false;
  }
  return true;
}

ProblemPtr load_problem(const std::string& path, int* exit_code) {
  ri_problem* raw = nullptr;
  const ri_status st = ri_problem_load(path.c_str(), &raw);
  if (st != RI_OK) {
    *exit_code = report_error(st);
    return nullptr;
  }
  ProblemPtr problem(raw);
  for (std::size_t i = 0; i < ri_problem_num_dropped_states(raw); ++i) {
    std::cerr << "note: dropped zero-prior state " << ri_problem_dropped_state(raw, i) << '\n';
  }
  return problem;
}

// Writes solution.json plus the two CSVs under `stem`; records them in `manifest`.
int write_solution(const ri_solution* sol, const Options& opt, const std::string& stem,
                   RunManifest& manifest) {
  const std::string doc = out_path(opt, stem + ".json");
  const std::string actions = out_path(opt, stem + "_actions.csv");
  const std::string states = out_path(opt, stem + "_states.csv");
  ri_status st = ri_solution_write_json(sol, doc.c_str());
  if (st == RI_OK) st = ri_solution_write_csv(sol, actions.c_str(), states.c_str());
  if (st != RI_OK) return report_error(st);
  manifest.output(doc);
  manifest.output(actions);
  manifest.output(states);
  return kExitOk;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_solve(const Options& opt, const CLI::App& sub, const std::string& problem_path) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest("solve", sub);
  manifest.input(problem_path);
  int code = kExitOk;
  ProblemPtr problem = load_problem(problem_path, &code);
  if (!problem) return code;
  if (!prepare_output_dir(opt)) return kExitInvalid;

  const ri_solver_config cfg = solver_config(opt, sub);
  ri_solution* raw = nullptr;
  const ri_status st = ri_solve(problem.get(), &cfg, &raw);
  SolutionPtr sol(raw);
  if (!sol) return report_error(st);
  if (st == RI_NOT_CONVERGED) code = report_error(st);

  const int wcode = write_solution(sol.get(), opt, "solution", manifest);
  if (wcode != kExitOk) return wcode;
  manifest.write(opt.output_dir, seconds_since(start));
  return code;
}

int cmd_bridge(const Options& opt, const CLI::App& sub, const std::string& problem_path,
               const std::string& nu_path) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest("bridge", sub);
  manifest.input(problem_path);
  manifest.input(nu_path);
  int code = kExitOk;
  ProblemPtr problem = load_problem(problem_path, &code);
  if (!problem) return code;
  if (!prepare_output_dir(opt)) return kExitInvalid;

  const ri_sinkhorn_config cfg = sinkhorn_config(opt, sub);
  ri_bridge* raw = nullptr;
  const ri_status st = ri_bridge_solve_file(problem.get(), nu_path.c_str(), &cfg, &raw);
  BridgePtr bridge(raw);
  if (!bridge) return report_error(st);
  if (st == RI_NOT_CONVERGED) code = report_error(st);

  const std::string doc = out_path(opt, "bridge.json");
  const ri_status wst = ri_bridge_write_json(bridge.get(), doc.c_str());
  if (wst != RI_OK) return report_error(wst);
  manifest.output(doc);
  manifest.write(opt.output_dir, seconds_since(start));
  return code;
}

int cmd_diagnose(const Options& opt, const CLI::App& sub, const std::string& problem_path,
                 const std::string& solution_path) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest("diagnose", sub);
  manifest.input(problem_path);
  manifest.input(solution_path);
  int code = kExitOk;
  ProblemPtr problem = load_problem(problem_path, &code);
  if (!problem) return code;

  ri_solution* raw_sol = nullptr;
  ri_status st = ri_solution_load(problem.get(), solution_path.c_str(), &raw_sol);
  SolutionPtr sol(raw_sol);
  if (st != RI_OK) return report_error(st);
  if (!prepare_output_dir(opt)) return kExitInvalid;

  ri_report* raw_report = nullptr;
  st = ri_diagnose(problem.get(), sol.get(), opt.seed, &raw_report);
  ReportPtr report(raw_report);
  if (st != RI_OK) return report_error(st);

  const std::string doc = out_path(opt, "report.json");
  const std::string csv = out_path(opt, "report.csv");
  st = ri_report_write_json(report.get(), doc.c_str());
  if (st == RI_OK) st = ri_report_write_csv(report.get(), csv.c_str());
  if (st != RI_OK) return report_error(st);
  manifest.output(doc);
  manifest.output(csv);

  for (std::size_t i = 0; i < ri_report_num_checks(report.get()); ++i) {
    ri_check c;
    ri_report_check(report.get(), i, &c);
    if (!c.pass) {
      std::cerr << "FAIL " << c.name << ": " << format_double(c.max_violation) << " > "
                << format_double(c.tolerance) << '\n';
    }
  }
  manifest.write(opt.output_dir, seconds_since(start));
  return ri_report_all_pass(report.get()) ? kExitOk : kExitNotConverged;
}

struct SweepRow {
  double lambda = 0.0;
  std::string status = "pending";
  std::size_t consideration_size = 0;
  double f_value = 0.0;
  double mutual_information = 0.0;
  std::vector<std::string> outputs;
  std::string message;
};

SweepRow sweep_one(const ri_problem* base, double lambda, std::size_t index, const Options& opt,
                   const ri_solver_config& cfg) {
  SweepRow row;
  row.lambda = lambda;
  ri_problem* raw = nullptr;
  ri_status st = ri_problem_with_lambda(base, lambda, &raw);
  ProblemPtr problem(raw);
  if (st != RI_OK) {
    row.status = "invalid";
    row.message = ri_last_error();
    return row;
  }
  ri_solution* raw_sol = nullptr;
  st = ri_solve(problem.get(), &cfg, &raw_sol);
  SolutionPtr sol(raw_sol);
  if (!sol) {
    row.status = "invalid";
    row.message = ri_last_error();
    return row;
  }
  row.status = st == RI_NOT_CONVERGED ? "not_converged" : "ok";
  row.consideration_size = ri_solution_consideration_size(sol.get());
  row.f_value = ri_solution_f_value(sol.get());
  row.mutual_information = ri_solution_mutual_information(sol.get());

  char stem[32];
  std::snprintf(stem, sizeof stem, "lambda_%03zu", index);
  const std::string doc = out_path(opt, std::string(stem) + ".json");
  const std::string actions = out_path(opt, std::string(stem) + "_actions.csv");
  const std::string states = out_path(opt, std::string(stem) + "_states.csv");
  st = ri_solution_write_json(sol.get(), doc.c_str());
  if (st == RI_OK) st = ri_solution_write_csv(sol.get(), actions.c_str(), states.c_str());
  if (st != RI_OK) {
    row.status = "io_error";
    row.message = ri_last_error();
    return row;
  }
  row.outputs = {doc, actions, states};
  return row;
}

int cmd_sweep(const Options& opt, const CLI::App& sub, const std::string& problem_path,
              const std::vector<double>& lambdas) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest("sweep", sub);
  manifest.input(problem_path);
  int code = kExitOk;
  ProblemPtr problem = load_problem(problem_path, &code);
  if (!problem) return code;
  if (!prepare_output_dir(opt)) return kExitInvalid;

  const ri_solver_config cfg = solver_config(opt, sub);
  std::vector<SweepRow> rows(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      rows[i] = sweep_one(problem.get(), lambdas[i], i, opt, cfg);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, lambdas.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Summary rows in lambda order; input order breaks ties.
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return rows[x].lambda < rows[y].lambda; });

  std::ostringstream csv;
  csv << "lambda,consideration_size,f_value,mutual_information,status\n";
  for (const std::size_t i : order) {
    const SweepRow& r = rows[i];
    csv << format_double(r.lambda) << ',';
    if (r.status == "ok" || r.status == "not_converged") {
      csv << r.consideration_size << ',' << format_double(r.f_value) << ','
          << format_double(r.mutual_information);
    } else {
      csv << ",,";
    }
    csv << ',' << r.status << '\n';
    if (!r.message.empty()) {
      std::cerr << "lambda " << format_double(r.lambda) << ": " << r.status << ": " << r.message
                << '\n';
    }
    if (r.status == "not_converged") {
      std::cerr << "lambda " << format_double(r.lambda) << ": not converged\n";
      if (code == kExitOk) code = kExitNotConverged;
    } else if (r.status != "ok") {
      code = kExitInvalid;
    }
    for (const auto& p : r.outputs) manifest.output(p);
  }
  const std::string summary = out_path(opt, "sweep_summary.csv");
  std::ofstream(summary) << csv.str();
  manifest.output(summary);
  manifest.write(opt.output_dir, seconds_since(start));
  return code;
}

void add_common(CLI::App* sub, Options& opt, bool solver_flags) {
  sub->add_option("--output-dir", opt.output_dir, "Directory for output files")
      ->capture_default_str();
  sub->add_option("--tolerance", opt.tolerance, "Sinkhorn marginal tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", opt.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  if (!solver_flags) return;
  sub->add_option("--foc-tolerance", opt.foc_tolerance, "First-order condition tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", opt.seed, "Seed for random initialization")->capture_default_str();
  sub->add_option("--init", opt.init, "Initial action marginal")
      ->check(CLI::IsMember({"uniform", "random"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational inattention via nested entropic optimal transport"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ri_version()));

  Options opt;
  std::string problem_path;
  std::string second_path;
  std::vector<double> lambdas;

  CLI::App* solve = app.add_subcommand("solve", "Solve for the optimal action marginal");
  solve->add_option("problem", problem_path, "Problem document")->required();
  add_common(solve, opt, true);

  CLI::App* bridge = app.add_subcommand("bridge", "Solve the inner bridge at a fixed marginal");
  bridge->add_option("problem", problem_path, "Problem document")->required();
  bridge->add_option("nu", second_path, "Action marginal document")->required();
  add_common(bridge, opt, false);

  CLI::App* diagnose = app.add_subcommand("diagnose", "Certify a solution");
  diagnose->add_option("problem", problem_path, "Problem document")->required();
  diagnose->add_option("solution", second_path, "Solution document")->required();
  diagnose->add_option("--output-dir", opt.output_dir, "Directory for output files")
      ->capture_default_str();
  diagnose->add_option("--seed", opt.seed, "Seed for randomized checks")->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "Solve over a list of lambda values");
  sweep->add_option("problem", problem_path, "Problem document")->required();
  sweep->add_option("--lambdas", lambdas, "Lambda values")->required()->delimiter(',');
  sweep->add_option("--jobs", opt.jobs, "Concurrent solves")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(sweep, opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, *solve, problem_path);
    if (bridge->parsed()) return cmd_bridge(opt, *bridge, problem_path, second_path);
    if (diagnose->parsed()) return cmd_diagnose(opt, *diagnose, problem_path, second_path);
    if (sweep->parsed()) return cmd_sweep(opt, *sweep, problem_path, lambdas);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
