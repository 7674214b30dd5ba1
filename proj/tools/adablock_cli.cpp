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


// Command-line front end. Talks to the library only through adablock.h.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "adablock/adablock.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Failure {
  adablock_status status;
};

void Check(adablock_status s) {
  if (s != ADABLOCK_OK) throw Failure{s};
}

struct ScenarioDeleter {
  void operator()(adablock_scenario* p) const { adablock_scenario_free(p); }
};
struct PlanDeleter {
  void operator()(adablock_plan* p) const { adablock_plan_free(p); }
};
using ScenarioPtr = std::unique_ptr<adablock_scenario, ScenarioDeleter>;
using PlanPtr = std::unique_ptr<adablock_plan, PlanDeleter>;

struct Common {
  std::string scenario;
  std::string out = ".";
  uint64_t seed = 1;
  int devices = -1;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_option("--devices", c.devices,
                  "Use only the first N devices (or N generated ones)");
}

void AddSolverOptions(CLI::App* cmd, adablock_solver_options& o) {
  cmd->add_option("--levels", o.levels, "TTI levels per packet")
      ->capture_default_str();
  cmd->add_option("--samples", o.samples, "Random-search samples")
      ->capture_default_str();
  cmd->add_option("--iters", o.iters, "Local-search iterations")
      ->capture_default_str();
  cmd->add_option("--cap", o.cap, "Exhaustive search-space cap")
      ->capture_default_str();
  cmd->add_option("--episodes", o.episodes, "Training episodes")
      ->capture_default_str();
  cmd->add_option("--updates-per-step", o.updates_per_step,
                  "Gradient steps per environment step")
      ->capture_default_str();
  cmd->add_option("--eval-interval", o.eval_interval,
                  "Greedy evaluation period in episodes (0: off)")
      ->capture_default_str();
  cmd->add_option("--hidden-width", o.hidden_width)->capture_default_str();
  cmd->add_option("--hidden-depth", o.hidden_depth)->capture_default_str();
  cmd->add_option("--replay", o.replay_capacity, "Replay capacity")
      ->capture_default_str();
  cmd->add_option("--batch", o.batch_size)->capture_default_str();
  cmd->add_option("--sync", o.target_sync_period,
                  "Target sync period in updates")
      ->capture_default_str();
  cmd->add_option("--gamma", o.gamma)->capture_default_str();
  cmd->add_option("--eta", o.eta, "Step size for non-negative TD errors")
      ->capture_default_str();
  cmd->add_option("--beta", o.beta, "Step size for negative TD errors")
      ->capture_default_str();
  cmd->add_option("--epsilon-start", o.epsilon_start)->capture_default_str();
  cmd->add_option("--epsilon-end", o.epsilon_end)->capture_default_str();
  cmd->add_option("--omega1", o.omega1)->capture_default_str();
  cmd->add_option("--omega2", o.omega2)->capture_default_str();
  cmd->add_option("--omega3", o.omega3, "0 picks the default penalty")
      ->capture_default_str();
}

ScenarioPtr LoadScenario(const Common& c) {
  adablock_scenario* raw = nullptr;
  Check(adablock_scenario_load(c.scenario.c_str(), &raw));
  ScenarioPtr scn(raw);
  if (c.devices >= 0) {
    Check(adablock_scenario_with_device_count(scn.get(), c.devices, &raw));
    scn.reset(raw);
  }
  return scn;
}

PlanPtr LoadPlan(const adablock_scenario* scn, const std::string& path,
                 const std::string& baseline) {
  adablock_plan* raw = nullptr;
  if (!path.empty()) {
    Check(adablock_plan_load(path.c_str(), &raw));
  } else {
    Check(adablock_plan_baseline(scn, baseline.c_str(), &raw));
  }
  return PlanPtr(raw);
}

adablock_run_options RunOptions(const Common& c) {
  adablock_run_options r;
  adablock_run_options_init(&r);
  r.out_dir = c.out.c_str();
  r.seed = c.seed;
  return r;
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive blocklength planning for grant-free access"};
  app.set_version_flag("--version", std::string(adablock_version()));
  app.require_subcommand(1);

  adablock_solver_options sopt;
  adablock_solver_options_init(&sopt);
  adablock_sim_options sim;
  adablock_sim_options_init(&sim);

  Common analyze_c, sweep_c, opt_c, train_c, sim_c;
  std::string plan_path, baseline = "lte", solver = "exhaustive";
  std::string sweep_axis, sweep_solvers = "lte,nr,exhaustive";
  std::string train_solver = "marl", mode = "model", fold = "idle";

  auto* analyze = app.add_subcommand("analyze", "Delay breakdown of a plan");
  AddCommon(analyze, analyze_c);
  auto* ap = analyze->add_option("--plan", plan_path, "Plan JSON file")
                 ->check(CLI::ExistingFile);
  analyze->add_option("--baseline", baseline, "Fixed plan: lte or nr")
      ->check(CLI::IsMember({"lte", "nr"}))
      ->excludes(ap)
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
  AddCommon(sweep, sweep_c);
  sweep->add_option("--sweep", sweep_axis,
                    "axis:start:stop:step with axis in bits_per_packet, "
                    "device_count, blocklength, tti")
      ->required();
  sweep->add_option("--solver", sweep_solvers, "Comma-separated solvers")
      ->capture_default_str();
  AddSolverOptions(sweep, sopt);

  auto* optimize = app.add_subcommand("optimize", "Search for a plan");
  AddCommon(optimize, opt_c);
  optimize
      ->add_option("--solver", solver,
                   "lte, nr, exhaustive, oracle, random, local, marl or idqn")
      ->check(CLI::IsMember(
          {"lte", "nr", "exhaustive", "oracle", "random", "local", "marl",
           "idqn"}))
      ->capture_default_str();
  AddSolverOptions(optimize, sopt);

  auto* train = app.add_subcommand("train", "Train the learning planner");
  AddCommon(train, train_c);
  train->add_option("--solver", train_solver, "marl or idqn")
      ->check(CLI::IsMember({"marl", "idqn"}))
      ->capture_default_str();
  AddSolverOptions(train, sopt);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of a plan");
  AddCommon(simulate, sim_c);
  auto* sp = simulate->add_option("--plan", plan_path, "Plan JSON file")
                 ->check(CLI::ExistingFile);
  simulate->add_option("--baseline", baseline, "Fixed plan: lte or nr")
      ->check(CLI::IsMember({"lte", "nr"}))
      ->excludes(sp)
      ->capture_default_str();
  simulate->add_option("--mode", mode, "model or protocol")
      ->check(CLI::IsMember({"model", "protocol"}))
      ->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Simulated rounds")
      ->capture_default_str();
  simulate->add_option("--warmup", sim.warmup, "-1: 10% of steps")
      ->capture_default_str();
  simulate->add_option("--batches", sim.batches, "Batch-means batches")
      ->capture_default_str();
  simulate->add_option("--fold", fold, "Queue tail fold: idle or cap")
      ->check(CLI::IsMember({"idle", "cap"}))
      ->capture_default_str();
  simulate->add_flag("--always-active", sim.always_active,
                     "Protocol mode: every device contends each round");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*analyze) {
      ScenarioPtr scn = LoadScenario(analyze_c);
      PlanPtr plan = LoadPlan(scn.get(), plan_path, baseline);
      const adablock_run_options run = RunOptions(analyze_c);
      double delay = 0;
      int feasible = 0;
      Check(adablock_run_analyze(scn.get(), plan.get(), &run, &delay,
                                 &feasible));
      std::printf("average_delay_s=%s feasible=%s\n", Num(delay).c_str(),
                  feasible ? "true" : "false");
      return feasible ? kExitOk : kExitInfeasible;
    }
    if (*sweep) {
      ScenarioPtr scn = LoadScenario(sweep_c);
      const adablock_run_options run = RunOptions(sweep_c);
      Check(adablock_run_sweep(scn.get(), sweep_axis.c_str(),
                               sweep_solvers.c_str(), &sopt, &run));
      std::printf("wrote %s/sweep.csv\n", sweep_c.out.c_str());
      return kExitOk;
    }
    if (*optimize) {
      ScenarioPtr scn = LoadScenario(opt_c);
      const adablock_run_options run = RunOptions(opt_c);
      double obj = 0;
      int found = 0;
      Check(adablock_run_optimize(scn.get(), solver.c_str(), &sopt, &run, &obj,
                                  &found, nullptr));
      std::printf("solver=%s objective_s=%s found=%s\n", solver.c_str(),
                  Num(obj).c_str(), found ? "true" : "false");
      return found ? kExitOk : kExitInfeasible;
    }
    if (*train) {
      ScenarioPtr scn = LoadScenario(train_c);
      const adablock_run_options run = RunOptions(train_c);
      double obj = 0;
      Check(adablock_run_train(scn.get(), train_solver.c_str(), &sopt, &run,
                               &obj));
      std::printf("solver=%s greedy_objective_s=%s\n", train_solver.c_str(),
                  Num(obj).c_str());
      return std::isfinite(obj) ? kExitOk : kExitInfeasible;
    }
    if (*simulate) {
      ScenarioPtr scn = LoadScenario(sim_c);
      PlanPtr plan = LoadPlan(scn.get(), plan_path, baseline);
      const adablock_run_options run = RunOptions(sim_c);
      sim.protocol = mode == "protocol";
      sim.cap_at_max = fold == "cap";
      double measured = 0, analytic = 0;
      Check(adablock_run_simulate(scn.get(), plan.get(), &sim, &run, &measured,
                                  &analytic));
      std::printf("sim_delay_s=%s analytic_delay_s=%s\n", Num(measured).c_str(),
                  Num(analytic).c_str());
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", adablock_status_name(f.status),
                 adablock_last_error());
    return f.status == ADABLOCK_E_INFEASIBLE ? kExitInfeasible : kExitError;
  }
  return kExitError;
}
