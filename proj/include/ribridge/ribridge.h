/*
 * Copyright 2026 The ribridge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the ribridge solver.
 *
 * All objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an ri_status; on failure a description is
 * available from ri_last_error() until the next call on the same thread.
 * Calls that can fail to converge still hand back their best result together
 * with RI_NOT_CONVERGED.
 */

#ifndef RIBRIDGE_RIBRIDGE_H_
#define RIBRIDGE_RIBRIDGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RI_API __declspec(dllexport)
#else
#define RI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ri_status {
  RI_OK = 0,
  RI_INVALID_ARGUMENT = 1,
  RI_VALIDATION_ERROR = 2,
  RI_NOT_CONVERGED = 3,
  RI_DIMENSION_MISMATCH = 4,
  RI_PARSE_ERROR = 5,
  RI_IO_ERROR = 6,
  RI_INTERNAL_ERROR = 7
} ri_status;

typedef enum ri_init { RI_INIT_UNIFORM = 0, RI_INIT_RANDOM = 1 } ri_init;

typedef struct ri_problem ri_problem;
typedef struct ri_solution ri_solution;
typedef struct ri_bridge ri_bridge;
typedef struct ri_report ri_report;

typedef struct ri_sinkhorn_config {
  double tolerance;
  size_t max_iterations;
  int log_domain;
} ri_sinkhorn_config;

typedef struct ri_solver_config {
  double f_tolerance;
  double foc_tolerance;
  double support_threshold;
  size_t max_iterations;
  ri_init init;
  uint64_t seed;
  ri_sinkhorn_config sinkhorn;
} ri_solver_config;

typedef struct ri_check {
  const char* name;
  double max_violation;
  double tolerance;
  int pass;
  const char* details;
} ri_check;

RI_API const char* ri_version(void);
RI_API const char* ri_last_error(void);
RI_API const char* ri_status_name(ri_status status);

RI_API void ri_sinkhorn_config_default(ri_sinkhorn_config* cfg);
RI_API void ri_solver_config_default(ri_solver_config* cfg);

/* Problems ---------------------------------------------------------------- */

/* Loads and validates a problem document. Validation failures return
 * RI_VALIDATION_ERROR with the violated invariant names in ri_last_error(). */
RI_API ri_status ri_problem_load(const char* path, ri_problem** out);
RI_API ri_status ri_problem_parse(const char* json_text, ri_problem** out);
/* utility is m x n, row-major. Labels are generated. */
RI_API ri_status ri_problem_create(size_t m, size_t n, const double* utility, double lambda,
                                   const double* prior, ri_problem** out);
/* Copy of `problem` with a different lambda. */
RI_API ri_status ri_problem_with_lambda(const ri_problem* problem, double lambda,
                                        ri_problem** out);
RI_API void ri_problem_free(ri_problem* problem);

RI_API size_t ri_problem_num_actions(const ri_problem* problem);
RI_API size_t ri_problem_num_states(const ri_problem* problem);
RI_API double ri_problem_lambda(const ri_problem* problem);
/* States dropped at load because their prior mass was zero. */
RI_API size_t ri_problem_num_dropped_states(const ri_problem* problem);
RI_API const char* ri_problem_dropped_state(const ri_problem* problem, size_t index);

/* Outer solve -------------------------------------------------------------- */

RI_API ri_status ri_solve(const ri_problem* problem, const ri_solver_config* cfg,
                          ri_solution** out);
RI_API void ri_solution_free(ri_solution* solution);

/* Copies min(len, m) entries of nu* into out; returns m. */
RI_API size_t ri_solution_nu(const ri_solution* solution, double* out, size_t len);
/* Row-major m x n coupling; returns m * n. */
RI_API size_t ri_solution_coupling(const ri_solution* solution, double* out, size_t len);
RI_API size_t ri_solution_foc_residuals(const ri_solution* solution, double* out, size_t len);
/* log Z(w; nu*), one entry per state; returns n. */
RI_API size_t ri_solution_log_partition(const ri_solution* solution, double* out, size_t len);
RI_API double ri_solution_f_value(const ri_solution* solution);
RI_API double ri_solution_mutual_information(const ri_solution* solution);
RI_API size_t ri_solution_consideration_size(const ri_solution* solution);
RI_API size_t ri_solution_iterations(const ri_solution* solution);
RI_API int ri_solution_converged(const ri_solution* solution);

RI_API ri_status ri_solution_write_json(const ri_solution* solution, const char* path);
RI_API ri_status ri_solution_write_csv(const ri_solution* solution, const char* actions_path,
                                       const char* states_path);
/* Reads a solution document written for `problem`. */
RI_API ri_status ri_solution_load(const ri_problem* problem, const char* path,
                                  ri_solution** out);

/* Inner bridge ------------------------------------------------------------- */

RI_API ri_status ri_bridge_solve(const ri_problem* problem, const double* nu, size_t len,
                                 const ri_sinkhorn_config* cfg, ri_bridge** out);
/* Reads nu from a JSON file holding an array or {"nu": [...]}. */
RI_API ri_status ri_bridge_solve_file(const ri_problem* problem, const char* nu_path,
                                      const ri_sinkhorn_config* cfg, ri_bridge** out);
RI_API void ri_bridge_free(ri_bridge* bridge);
RI_API double ri_bridge_value_primal(const ri_bridge* bridge);
RI_API double ri_bridge_value_dual(const ri_bridge* bridge);
RI_API double ri_bridge_duality_gap(const ri_bridge* bridge);
RI_API double ri_bridge_residual(const ri_bridge* bridge);
RI_API size_t ri_bridge_iterations(const ri_bridge* bridge);
RI_API size_t ri_bridge_coupling(const ri_bridge* bridge, double* out, size_t len);
RI_API ri_status ri_bridge_write_json(const ri_bridge* bridge, const char* path);

/* Diagnostics -------------------------------------------------------------- */

RI_API ri_status ri_diagnose(const ri_problem* problem, const ri_solution* solution,
                             uint64_t seed, ri_report** out);
RI_API void ri_report_free(ri_report* report);
RI_API int ri_report_all_pass(const ri_report* report);
RI_API size_t ri_report_num_checks(const ri_report* report);
/* Fills `out` with views that stay valid while the report lives. */
RI_API ri_status ri_report_check(const ri_report* report, size_t index, ri_check* out);
RI_API ri_status ri_report_write_json(const ri_report* report, const char* path);
RI_API ri_status ri_report_write_csv(const ri_report* report, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* RIBRIDGE_RIBRIDGE_H_ */
