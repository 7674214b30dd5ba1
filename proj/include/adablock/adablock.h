// Copyright 2026 The adablock Authors.
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


/* C interface to adablock. Every fallible call returns an adablock_status;
 * on failure adablock_last_error() holds a message for the calling thread.
 * Handles are opaque and owned by the caller. */

#ifndef ADABLOCK_ADABLOCK_H_
#define ADABLOCK_ADABLOCK_H_

#include <stdint.h>

#if defined(_WIN32)
#define ADABLOCK_API __declspec(dllexport)
#else
#define ADABLOCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adablock_status {
  ADABLOCK_OK = 0,
  ADABLOCK_E_INVALID_ARGUMENT = 1,
  ADABLOCK_E_DOMAIN = 2,
  ADABLOCK_E_PARSE = 3,
  ADABLOCK_E_SCHEMA = 4,
  ADABLOCK_E_INFEASIBLE = 5,
  ADABLOCK_E_CAP_EXCEEDED = 6,
  ADABLOCK_E_SHAPE = 7,
  ADABLOCK_E_IO = 8,
  ADABLOCK_E_SINGULAR = 9,
  ADABLOCK_E_INTERNAL = 99
} adablock_status;

typedef struct adablock_scenario adablock_scenario;
typedef struct adablock_plan adablock_plan;

ADABLOCK_API const char* adablock_version(void);
ADABLOCK_API const char* adablock_last_error(void);
ADABLOCK_API const char* adablock_status_name(adablock_status status);
/* Frees strings returned through char** out-parameters. */
ADABLOCK_API void adablock_string_free(char* s);

/* ---- scenarios ---- */
ADABLOCK_API adablock_status adablock_scenario_load(const char* path,
                                                    adablock_scenario** out);
ADABLOCK_API adablock_status adablock_scenario_parse(const char* json,
                                                     adablock_scenario** out);
ADABLOCK_API void adablock_scenario_free(adablock_scenario* scn);
ADABLOCK_API adablock_status adablock_scenario_device_count(
    const adablock_scenario* scn, int* out);
/* First `count` devices (or `count` generated devices). */
ADABLOCK_API adablock_status adablock_scenario_with_device_count(
    const adablock_scenario* scn, int count, adablock_scenario** out);
ADABLOCK_API adablock_status adablock_scenario_to_json(
    const adablock_scenario* scn, char** out);
ADABLOCK_API adablock_status adablock_scenario_hash(
    const adablock_scenario* scn, uint64_t* out);

/* ---- plans ---- */
ADABLOCK_API adablock_status adablock_plan_load(const char* path,
                                                adablock_plan** out);
ADABLOCK_API adablock_status adablock_plan_parse(const char* json,
                                                 adablock_plan** out);
/* name: "lte" or "nr". */
ADABLOCK_API adablock_status adablock_plan_baseline(
    const adablock_scenario* scn, const char* name, adablock_plan** out);
ADABLOCK_API void adablock_plan_free(adablock_plan* plan);
ADABLOCK_API adablock_status adablock_plan_to_json(
    const adablock_plan* plan, const adablock_scenario* scn, char** out);
/* Average delay in seconds; +inf when infeasible or starved. */
ADABLOCK_API adablock_status adablock_plan_objective(
    const adablock_scenario* scn, const adablock_plan* plan, double* out);
ADABLOCK_API adablock_status adablock_plan_feasible(
    const adablock_scenario* scn, const adablock_plan* plan, int* out);

/* ---- link and access math ---- */
ADABLOCK_API adablock_status adablock_q(double x, double* out);
ADABLOCK_API adablock_status adablock_q_inverse(double p, double* out);
ADABLOCK_API adablock_status adablock_channel_dispersion(double snr,
                                                         double* out);
ADABLOCK_API adablock_status adablock_achievable_rate(double snr, double n,
                                                      double eps, double* out);
ADABLOCK_API adablock_status adablock_error_probability(double snr, double n,
                                                        double bits,
                                                        double* out);
/* Fading-averaged error for mean SNR c. */
ADABLOCK_API adablock_status adablock_expected_error_probability(
    double n, double bits, double mean_snr, double* out);
ADABLOCK_API adablock_status adablock_p_no_collision(int devices,
                                                     int preambles,
                                                     double* out);

/* ---- commands ---- */
typedef struct adablock_run_options {
  const char* out_dir; /* created if missing; NULL means "." */
  uint64_t seed;
} adablock_run_options;

typedef struct adablock_solver_options {
  int levels;
  int samples;
  int iters;
  uint64_t cap;
  /* learning */
  int episodes;
  int updates_per_step;
  int eval_interval;
  int hidden_width;
  int hidden_depth;
  int replay_capacity;
  int batch_size;
  int target_sync_period;
  double gamma;
  double eta;
  double beta;
  double epsilon_start;
  double epsilon_end;
  double omega1;
  double omega2;
  double omega3;
  int period_feature;
} adablock_solver_options;

typedef struct adablock_sim_options {
  int protocol; /* 0: chain model, 1: slot-level contention */
  int64_t steps;
  int64_t warmup; /* -1: 10% of steps */
  int batches;
  int cap_at_max; /* tail fold into the full state instead of idle */
  int always_active;
} adablock_sim_options;

ADABLOCK_API void adablock_run_options_init(adablock_run_options* o);
ADABLOCK_API void adablock_solver_options_init(adablock_solver_options* o);
ADABLOCK_API void adablock_sim_options_init(adablock_sim_options* o);

/* Writes analyze.csv, plan.json, scenario.json. */
ADABLOCK_API adablock_status adablock_run_analyze(
    const adablock_scenario* scn, const adablock_plan* plan,
    const adablock_run_options* run, double* avg_delay_s, int* feasible);
/* axis: "name:start:stop:step"; solvers: comma-separated list. */
ADABLOCK_API adablock_status adablock_run_sweep(
    const adablock_scenario* scn, const char* axis, const char* solvers,
    const adablock_solver_options* opt, const adablock_run_options* run);
/* *plan_out may be NULL; receives the plan when one was found. */
ADABLOCK_API adablock_status adablock_run_optimize(
    const adablock_scenario* scn, const char* solver,
    const adablock_solver_options* opt, const adablock_run_options* run,
    double* objective_s, int* found, adablock_plan** plan_out);
/* solver: "marl" or "idqn". */
ADABLOCK_API adablock_status adablock_run_train(
    const adablock_scenario* scn, const char* solver,
    const adablock_solver_options* opt, const adablock_run_options* run,
    double* greedy_objective_s);
ADABLOCK_API adablock_status adablock_run_simulate(
    const adablock_scenario* scn, const adablock_plan* plan,
    const adablock_sim_options* sim, const adablock_run_options* run,
    double* sim_delay_s, double* analytic_delay_s);

#ifdef __cplusplus
}
#endif

#endif /* ADABLOCK_ADABLOCK_H_ */
