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


#include "adablock/adablock.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "adablock/access.hpp"
#include "adablock/commands.hpp"
#include "adablock/errors.hpp"

struct adablock_scenario {
  adablock::ScenarioSpec spec;
};

struct adablock_plan {
  adablock::BlocklengthPlan plan;
};

namespace {

using adablock::Error;
using adablock::ErrorCode;

thread_local std::string g_last_error;

adablock_status Fail(adablock_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
adablock_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ADABLOCK_OK;
  } catch (const Error& e) {
    return Fail(static_cast<adablock_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(ADABLOCK_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(ADABLOCK_E_INTERNAL, e.what());
  } catch (...) {
    return Fail(ADABLOCK_E_INTERNAL, "unknown failure");
  }
}

void Need(const void* p, const char* what) {
  if (p == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is null");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

adablock::RunContext Context(const adablock_run_options* run) {
  adablock::RunContext ctx;
  if (run != nullptr) {
    if (run->out_dir != nullptr) ctx.out_dir = run->out_dir;
    ctx.seed = run->seed;
  }
  return ctx;
}

adablock::SolverOptions Solver(const adablock_solver_options* o) {
  adablock_solver_options d;
  adablock_solver_options_init(&d);
  if (o == nullptr) o = &d;
  adablock::SolverOptions s;
  s.levels = o->levels;
  s.samples = o->samples;
  s.iters = o->iters;
  s.cap = o->cap;
  adablock::MarlConfig& m = s.marl;
  m.tti_levels = o->levels;
  m.episodes = o->episodes;
  m.updates_per_step = o->updates_per_step;
  m.eval_interval = o->eval_interval;
  if (o->hidden_depth < 0 || o->hidden_width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "hidden layer shape");
  }
  m.hidden_layers.assign(o->hidden_depth, o->hidden_width);
  m.replay_capacity = o->replay_capacity;
  m.batch_size = o->batch_size;
  m.target_sync_period = o->target_sync_period;
  m.gamma = o->gamma;
  m.eta = o->eta;
  m.beta = o->beta;
  m.epsilon_start = o->epsilon_start;
  m.epsilon_end = o->epsilon_end;
  m.omega1 = o->omega1;
  m.omega2 = o->omega2;
  m.omega3 = o->omega3;
  m.period_feature = o->period_feature != 0;
  if (s.levels < 1 || s.samples < 0 || s.iters < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "levels must be >= 1; samples and iters >= 0");
  }
  return s;
}

template <typename T>
void Put(T* dst, T v) {
  if (dst != nullptr) *dst = v;
}

}  // namespace

extern "C" {

const char* adablock_version(void) { return "0.1.0"; }

const char* adablock_last_error(void) { return g_last_error.c_str(); }

const char* adablock_status_name(adablock_status status) {
  switch (status) {
    case ADABLOCK_OK: return "ok";
    case ADABLOCK_E_INVALID_ARGUMENT: return "invalid_argument";
    case ADABLOCK_E_DOMAIN: return "domain";
    case ADABLOCK_E_PARSE: return "parse";
    case ADABLOCK_E_SCHEMA: return "schema";
    case ADABLOCK_E_INFEASIBLE: return "infeasible";
    case ADABLOCK_E_CAP_EXCEEDED: return "cap_exceeded";
    case ADABLOCK_E_SHAPE: return "shape";
    case ADABLOCK_E_IO: return "io";
    case ADABLOCK_E_SINGULAR: return "singular";
    case ADABLOCK_E_INTERNAL: return "internal";
  }
  return "unknown";
}

void adablock_string_free(char* s) { std::free(s); }

adablock_status adablock_scenario_load(const char* path,
                                       adablock_scenario** out) {
  return Guard([&] {
    Need(path, "path");
    Need(out, "out");
    *out = new adablock_scenario{adablock::LoadScenario(path)};
  });
}

adablock_status adablock_scenario_parse(const char* json,
                                        adablock_scenario** out) {
  return Guard([&] {
    Need(json, "json");
    Need(out, "out");
    *out = new adablock_scenario{adablock::ParseScenario(json)};
  });
}

void adablock_scenario_free(adablock_scenario* scn) { delete scn; }

adablock_status adablock_scenario_device_count(const adablock_scenario* scn,
                                               int* out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(out, "out");
    *out = scn->spec.scenario.device_count();
  });
}

adablock_status adablock_scenario_with_device_count(
    const adablock_scenario* scn, int count, adablock_scenario** out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(out, "out");
    adablock::ScenarioSpec spec = scn->spec;
    spec.scenario = adablock::WithDeviceCount(scn->spec, count);
    *out = new adablock_scenario{std::move(spec)};
  });
}

adablock_status adablock_scenario_to_json(const adablock_scenario* scn,
                                          char** out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(out, "out");
    *out = CopyString(adablock::ScenarioToJson(scn->spec.scenario));
  });
}

adablock_status adablock_scenario_hash(const adablock_scenario* scn,
                                       uint64_t* out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(out, "out");
    *out = adablock::ScenarioHash(scn->spec.scenario);
  });
}

adablock_status adablock_plan_load(const char* path, adablock_plan** out) {
  return Guard([&] {
    Need(path, "path");
    Need(out, "out");
    *out = new adablock_plan{adablock::LoadPlan(path)};
  });
}

adablock_status adablock_plan_parse(const char* json, adablock_plan** out) {
  return Guard([&] {
    Need(json, "json");
    Need(out, "out");
    *out = new adablock_plan{adablock::ParsePlan(json)};
  });
}

adablock_status adablock_plan_baseline(const adablock_scenario* scn,
                                       const char* name, adablock_plan** out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(name, "name");
    Need(out, "out");
    *out = new adablock_plan{adablock::BaselinePlan(scn->spec.scenario, name)};
  });
}

void adablock_plan_free(adablock_plan* plan) { delete plan; }

adablock_status adablock_plan_to_json(const adablock_plan* plan,
                                      const adablock_scenario* scn,
                                      char** out) {
  return Guard([&] {
    Need(plan, "plan");
    Need(out, "out");
    const uint64_t h = scn ? adablock::ScenarioHash(scn->spec.scenario) : 0;
    *out = CopyString(adablock::PlanToJson(plan->plan, h));
  });
}

adablock_status adablock_plan_objective(const adablock_scenario* scn,
                                        const adablock_plan* plan,
                                        double* out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(plan, "plan");
    Need(out, "out");
    adablock::ValidatePlan(scn->spec.scenario, plan->plan);
    *out = adablock::PlanObjective(scn->spec.scenario, plan->plan);
  });
}

adablock_status adablock_plan_feasible(const adablock_scenario* scn,
                                       const adablock_plan* plan, int* out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(plan, "plan");
    Need(out, "out");
    adablock::ValidatePlan(scn->spec.scenario, plan->plan);
    *out = std::isfinite(
        adablock::PlanObjective(scn->spec.scenario, plan->plan));
  });
}

adablock_status adablock_q(double x, double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = adablock::QFunction(x);
  });
}

adablock_status adablock_q_inverse(double p, double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = adablock::QInverse(p);
  });
}

adablock_status adablock_channel_dispersion(double snr, double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = adablock::ChannelDispersion(snr);
  });
}

adablock_status adablock_achievable_rate(double snr, double n, double eps,
                                         double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = adablock::AchievableRate(snr, n, eps);
  });
}

adablock_status adablock_error_probability(double snr, double n, double bits,
                                           double* out) {
  return Guard([&] {
    Need(out, "out");
    if (!(n > 0)) throw adablock::DomainError("blocklength must be positive");
    *out = adablock::ErrorProbabilityExact(snr, n, bits / n);
  });
}

adablock_status adablock_expected_error_probability(double n, double bits,
                                                    double mean_snr,
                                                    double* out) {
  return Guard([&] {
    Need(out, "out");
    adablock::RadioConstants rc;
    rc.noise_power_w = rc.power_threshold_w / mean_snr;
    rc.Validate();
    *out = adablock::ExpectedErrorProbability(n, bits, rc);
  });
}

adablock_status adablock_p_no_collision(int devices, int preambles,
                                        double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = adablock::PNoCollision(adablock::ContentionConfig{devices, preambles});
  });
}

void adablock_run_options_init(adablock_run_options* o) {
  if (o == nullptr) return;
  o->out_dir = ".";
  o->seed = 1;
}

void adablock_solver_options_init(adablock_solver_options* o) {
  if (o == nullptr) return;
  const adablock::SolverOptions s;
  const adablock::MarlConfig& m = s.marl;
  o->levels = s.levels;
  o->samples = s.samples;
  o->iters = s.iters;
  o->cap = s.cap;
  o->episodes = m.episodes;
  o->updates_per_step = m.updates_per_step;
  o->eval_interval = m.eval_interval;
  o->hidden_width = m.hidden_layers.empty() ? 64 : m.hidden_layers.front();
  o->hidden_depth = static_cast<int>(m.hidden_layers.size());
  o->replay_capacity = m.replay_capacity;
  o->batch_size = m.batch_size;
  o->target_sync_period = m.target_sync_period;
  o->gamma = m.gamma;
  o->eta = m.eta;
  o->beta = m.beta;
  o->epsilon_start = m.epsilon_start;
  o->epsilon_end = m.epsilon_end;
  o->omega1 = m.omega1;
  o->omega2 = m.omega2;
  o->omega3 = m.omega3;
  o->period_feature = m.period_feature ? 1 : 0;
}

void adablock_sim_options_init(adablock_sim_options* o) {
  if (o == nullptr) return;
  const adablock::SimConfig c;
  o->protocol = 0;
  o->steps = c.steps;
  o->warmup = c.warmup;
  o->batches = c.batches;
  o->cap_at_max = 0;
  o->always_active = 0;
}

adablock_status adablock_run_analyze(const adablock_scenario* scn,
                                     const adablock_plan* plan,
                                     const adablock_run_options* run,
                                     double* avg_delay_s, int* feasible) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(plan, "plan");
    const adablock::AnalyzeOutcome out =
        adablock::CmdAnalyze(scn->spec, plan->plan, Context(run));
    Put(avg_delay_s, out.report.average);
    Put(feasible, out.feasible ? 1 : 0);
  });
}

adablock_status adablock_run_sweep(const adablock_scenario* scn,
                                   const char* axis, const char* solvers,
                                   const adablock_solver_options* opt,
                                   const adablock_run_options* run) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(axis, "axis");
    std::vector<std::string> list;
    if (solvers != nullptr) {
      std::string cur;
      for (const char* c = solvers;; ++c) {
        if (*c == ',' || *c == '\0') {
          if (!cur.empty()) list.push_back(cur);
          cur.clear();
          if (*c == '\0') break;
        } else if (*c != ' ') {
          cur += *c;
        }
      }
    }
    adablock::CmdSweep(scn->spec, adablock::ParseSweepAxis(axis), list,
                       Solver(opt), Context(run));
  });
}

adablock_status adablock_run_optimize(const adablock_scenario* scn,
                                      const char* solver,
                                      const adablock_solver_options* opt,
                                      const adablock_run_options* run,
                                      double* objective_s, int* found,
                                      adablock_plan** plan_out) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(solver, "solver");
    adablock::SolveOutcome out =
        adablock::CmdOptimize(scn->spec, solver, Solver(opt), Context(run));
    Put(objective_s, out.objective);
    Put(found, out.found ? 1 : 0);
    if (plan_out != nullptr) {
      *plan_out = out.found ? new adablock_plan{std::move(out.plan)} : nullptr;
    }
  });
}

adablock_status adablock_run_train(const adablock_scenario* scn,
                                   const char* solver,
                                   const adablock_solver_options* opt,
                                   const adablock_run_options* run,
                                   double* greedy_objective_s) {
  return Guard([&] {
    Need(scn, "scenario");
    const std::string name = solver ? solver : "marl";
    if (name != "marl" && name != "idqn") {
      throw Error(ErrorCode::kInvalidArgument,
                  "train solver must be marl or idqn, got '" + name + "'");
    }
    adablock::MarlConfig cfg = Solver(opt).marl;
    cfg.cooperative = name == "marl";
    const adablock::MarlRun r =
        adablock::CmdTrain(scn->spec, cfg, Context(run));
    Put(greedy_objective_s, r.greedy_objective);
  });
}

adablock_status adablock_run_simulate(const adablock_scenario* scn,
                                      const adablock_plan* plan,
                                      const adablock_sim_options* sim,
                                      const adablock_run_options* run,
                                      double* sim_delay_s,
                                      double* analytic_delay_s) {
  return Guard([&] {
    Need(scn, "scenario");
    Need(plan, "plan");
    adablock_sim_options d;
    adablock_sim_options_init(&d);
    if (sim == nullptr) sim = &d;
    adablock::SimConfig cfg;
    cfg.mode = sim->protocol ? adablock::SimMode::kProtocol
                             : adablock::SimMode::kModel;
    cfg.steps = sim->steps;
    cfg.warmup = sim->warmup;
    cfg.batches = sim->batches;
    cfg.fold = sim->cap_at_max ? adablock::TailFold::kCapAtMax
                               : adablock::TailFold::kIdle;
    cfg.always_active = sim->always_active != 0;
    const adablock::SimulateOutcome out =
        adablock::CmdSimulate(scn->spec, plan->plan, cfg, Context(run));
    Put(sim_delay_s, out.stats.mean_delay);
    double avg = 0;
    for (double v : out.analytic_delay) avg += v;
    if (!out.analytic_delay.empty()) avg /= out.analytic_delay.size();
    Put(analytic_delay_s, avg);
  });
}

}  // extern "C"
