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


// The subcommands behind the command-line tool. Each one writes its CSV and
// JSON artifacts into an output directory: the resolved scenario
// (scenario.json) plus command-specific files. Every CSV starts with a
// "# scenario_hash=<hex> seed=<n>" line followed by a header whose column
// names carry units.

#ifndef ADABLOCK_COMMANDS_HPP_
#define ADABLOCK_COMMANDS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adablock/baselines.hpp"
#include "adablock/io.hpp"
#include "adablock/marl.hpp"
#include "adablock/simulate.hpp"

namespace adablock {

struct RunContext {
  std::string out_dir = ".";
  uint64_t seed = 1;
};

// Solvers: "lte", "nr" (fixed TTI), "exhaustive", "oracle" (exhaustive
// optimum computed cohort by cohort), "random", "local" (hill
// climbing from the better fixed-TTI plan), "marl" (cooperative M-DQN) and "idqn"
// (independent DQN).
struct SolverOptions {
  int levels = 10;
  int samples = 1000;
  int iters = 1000;
  uint64_t cap = kDefaultEnumerationCap;
  MarlConfig marl;
};

struct SolveOutcome {
  std::string solver;
  bool found = false;
  BlocklengthPlan plan;
  double objective = 0;  // +inf when nothing feasible was found
  uint64_t evaluations = 0;
};

bool IsKnownSolver(std::string_view name);
// Throws Error(kCapExceeded) from the exhaustive solver and
// Error(kInvalidArgument) for unknown names. Infeasibility is reported
// through `found`.
SolveOutcome Solve(const Scenario& scn, std::string_view solver,
                   const SolverOptions& opt, uint64_t seed);

// Fixed plan: "lte" or "nr".
BlocklengthPlan BaselinePlan(const Scenario& scn, std::string_view name);

struct AnalyzeOutcome {
  DelayReport report;
  bool feasible = false;  // constraints hold and nothing starves
};
AnalyzeOutcome CmdAnalyze(const ScenarioSpec& spec, const BlocklengthPlan& plan,
                          const RunContext& ctx);

struct SweepAxis {
  std::string name;  // bits_per_packet, device_count, blocklength, tti
  double start = 0;
  double stop = 0;
  double step = 1;

  std::vector<double> Values() const;
};
// "axis:start:stop:step"; Error(kInvalidArgument) on a malformed spec.
SweepAxis ParseSweepAxis(std::string_view text);

// Returns the CSV text it wrote to sweep.csv. For the tti and blocklength
// axes every active device uses the common value (the solver list does
// not apply); the other axes run each solver at every point.
std::string CmdSweep(const ScenarioSpec& spec, const SweepAxis& axis,
                     const std::vector<std::string>& solvers,
                     const SolverOptions& opt, const RunContext& ctx);

// Writes optimize.csv and, when a plan was found, plan.json. A cap overrun
// is written as an error row before the exception propagates.
SolveOutcome CmdOptimize(const ScenarioSpec& spec, std::string_view solver,
                         const SolverOptions& opt, const RunContext& ctx);

// Writes train_curve.csv, train_summary.csv, plan.json (greedy plan) and
// weights.bin.
MarlRun CmdTrain(const ScenarioSpec& spec, const MarlConfig& cfg,
                 const RunContext& ctx);

struct SimulateOutcome {
  SimStats stats;
  std::vector<double> analytic_delay;  // per device
  std::vector<double> tv_distance;     // occupancy vs analytic pi
};
// Writes simulate.csv (one row per device) and simulate_summary.csv.
SimulateOutcome CmdSimulate(const ScenarioSpec& spec,
                            const BlocklengthPlan& plan, SimConfig cfg,
                            const RunContext& ctx);

}  // namespace adablock

#endif  // ADABLOCK_COMMANDS_HPP_
