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


#include "adablock/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "adablock/errors.hpp"
#include "adablock/rng.hpp"

namespace adablock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kSmoothingWindow = 50;

std::string PathIn(const RunContext& ctx, const char* name) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

std::string Prelude(uint64_t hash, uint64_t seed) {
  return "# scenario_hash=" + HashHex(hash) + " seed=" + std::to_string(seed) +
         "\n";
}

std::string Join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += FormatDouble(v[i]);
  }
  return s;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

// Comma-separated row builder.
class Row {
 public:
  Row& operator<<(const std::string& s) {
    Sep();
    line_ += s;
    return *this;
  }
  Row& operator<<(const char* s) { return *this << std::string(s); }
  Row& operator<<(double v) { return *this << FormatDouble(v); }
  Row& operator<<(int v) { return *this << std::to_string(v); }
  Row& operator<<(int64_t v) { return *this << std::to_string(v); }
  Row& operator<<(uint64_t v) { return *this << std::to_string(v); }
  std::string str() const { return line_ + "\n"; }

 private:
  void Sep() {
    if (!first_) line_ += ',';
    first_ = false;
  }
  std::string line_;
  bool first_ = true;
};

void WriteScenario(const Scenario& scn, const RunContext& ctx) {
  WriteFile(PathIn(ctx, "scenario.json"), ScenarioToJson(scn));
}

// Means over every (active device, packet) pair of the plan.
struct PacketMeans {
  double blocklength = kNan;
  double p_err = kNan;
  double p_suc = kNan;
  double e_mre = kNan;
};

PacketMeans MeanPacketStats(const Scenario& scn, const BlocklengthPlan& plan) {
  PacketMeans out;
  double n = 0, pe = 0, ps = 0, re = 0;
  int count = 0;
  for (int k = 0; k < scn.device_count(); ++k) {
    const int len = static_cast<int>(plan.devices[k].ttis_s.size());
    if (len == 0) continue;
    const PacketStats st = ComputePacketStats(scn, plan, k);
    for (int m = 1; m <= len; ++m) {
      n += BlocklengthOf(scn, plan, k, m);
      pe += st.p_err[m - 1];
      ps += st.p_suc[m - 1];
      re += st.expected_retx[m - 1];
      ++count;
    }
  }
  if (count > 0) {
    out.blocklength = n / count;
    out.p_err = pe / count;
    out.p_suc = ps / count;
    out.e_mre = re / count;
  }
  return out;
}

// Plan where every active device uses blocklength n with its even share
// of subchannels.
BlocklengthPlan CommonBlocklengthPlan(const Scenario& scn, double n) {
  BlocklengthPlan plan = FixedTtiPlan(scn, 1.0);
  for (DevicePlan& dp : plan.devices) {
    const double t = n / (dp.subchannels * scn.subchannel_bandwidth_hz);
    std::fill(dp.ttis_s.begin(), dp.ttis_s.end(), t);
  }
  return plan;
}

// Runs fn(i) for i in [0, n) on a bounded pool; results stay in index
// order whatever the completion order.
template <typename T, typename Fn>
std::vector<T> ParallelMap(int n, Fn fn) {
  std::vector<T> out(n);
  const int width =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  for (int base = 0; base < n; base += width) {
    std::vector<std::future<T>> wave;
    for (int i = base; i < std::min(n, base + width); ++i) {
      wave.push_back(std::async(std::launch::async, fn, i));
    }
    for (size_t j = 0; j < wave.size(); ++j) out[base + j] = wave[j].get();
  }
  return out;
}

}  // namespace

bool IsKnownSolver(std::string_view name) {
  return name == "lte" || name == "nr" || name == "exhaustive" ||
         name == "oracle" ||
         name == "random" || name == "local" || name == "marl" ||
         name == "idqn";
}

BlocklengthPlan BaselinePlan(const Scenario& scn, std::string_view name) {
  if (name == "lte") return FixedTtiPlan(scn, kLteTtiS);
  if (name == "nr") return FixedTtiPlan(scn, kNrTtiS);
  throw Error(ErrorCode::kInvalidArgument,
              "unknown baseline '" + std::string(name) + "' (use lte or nr)");
}

SolveOutcome Solve(const Scenario& scn, std::string_view solver,
                   const SolverOptions& opt, uint64_t seed) {
  if (!IsKnownSolver(solver)) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown solver '" + std::string(solver) + "'");
  }
  scn.Validate();
  SolveOutcome out;
  out.solver = std::string(solver);
  out.objective = kInf;
  auto take = [&](SearchResult r) {
    out.found = r.found;
    out.evaluations = r.evaluations;
    if (r.found) {
      out.plan = std::move(r.plan);
      out.objective = r.objective;
    }
  };

  if (solver == "lte" || solver == "nr") {
    out.evaluations = 1;
    try {
      out.plan = BaselinePlan(scn, solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasible) throw;
      return out;
    }
    out.objective = PlanObjective(scn, out.plan);
    out.found = std::isfinite(out.objective);
    return out;
  }
  if (solver == "marl" || solver == "idqn") {
    MarlConfig cfg = opt.marl;
    cfg.tti_levels = opt.levels;
    cfg.cooperative = solver == "marl";
    MarlRun run = Train(scn, cfg, seed);
    out.evaluations = static_cast<uint64_t>(cfg.episodes);
    out.plan = std::move(run.greedy_plan);
    out.objective = run.greedy_objective;
    out.found = std::isfinite(out.objective);
    return out;
  }
  const SearchSpace space = MakeSearchSpace(scn, opt.levels, true);
  if (solver == "exhaustive") {
    take(ExhaustiveSearch(scn, space, opt.cap));
  } else if (solver == "oracle") {
    take(OracleSearch(scn, space, opt.cap));
  } else if (solver == "random") {
    take(RandomSearch(scn, space, opt.samples, seed));
  } else {
    // Hill climbing starts from the better fixed-TTI plan.
    BlocklengthPlan init;
    double init_obj = kInf;
    for (const char* name : {"lte", "nr"}) {
      try {
        BlocklengthPlan p = BaselinePlan(scn, name);
        const double obj = PlanObjective(scn, p);
        if (init.devices.empty() || obj < init_obj) {
          init = std::move(p);
          init_obj = obj;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasible) throw;
      }
    }
    if (init.devices.empty()) return out;
    take(LocalSearch(scn, space, init, opt.iters, seed));
  }
  return out;
}

AnalyzeOutcome CmdAnalyze(const ScenarioSpec& spec, const BlocklengthPlan& plan,
                          const RunContext& ctx) {
  const Scenario& scn = spec.scenario;
  scn.Validate();
  ValidatePlan(scn, plan);
  const uint64_t hash = ScenarioHash(scn);
  AnalyzeOutcome out;
  out.report = Analyze(scn, plan);
  const DelayReport& rep = out.report;
  out.feasible = rep.feasibility.ok() && std::isfinite(rep.average);

  std::string csv = Prelude(hash, ctx.seed);
  csv += "device,max_len,rate_per_s,distance_m,subchannels,tti_s,d_que_s,"
         "d_tra_s,d_pp_s,d_ota_s,p_suc,e_mre,starved,period_ok,rate_ok\n";
  const int num = scn.device_count();
  double que = 0, tra = 0, pp = 0;
  for (int k = 0; k < num; ++k) {
    const DeviceDelay& d = rep.devices[k];
    const DevicePlan& dp = plan.devices[k];
    que += d.queuing;
    tra += d.transmission;
    pp += d.proc_prop;
    Row r;
    r << k << scn.max_queue_length(k) << scn.devices[k].rate_per_s
      << scn.devices[k].distance_m << dp.subchannels << Join(dp.ttis_s)
      << d.queuing << d.transmission << d.proc_prop << d.total
      << Join(d.stats.p_suc) << Join(d.stats.expected_retx)
      << Bool(rep.starved[k]) << Bool(rep.feasibility.device_period_ok[k])
      << Bool(rep.feasibility.device_rate_ok[k]);
    csv += r.str();
  }
  const double denom = std::max(1, num);
  Row s;
  s << "mean" << "" << "" << "" << rep.feasibility.subchannels_used << ""
    << que / denom << tra / denom << pp / denom << rep.average << "" << ""
    << Bool(!std::isfinite(rep.average)) << Bool(rep.feasibility.period_ok)
    << Bool(rep.feasibility.rate_ok);
  csv += s.str();
  csv += "# subchannels_ok=" + Bool(rep.feasibility.subchannels_ok) +
         " feasible=" + Bool(out.feasible) + "\n";

  WriteScenario(scn, ctx);
  WriteFile(PathIn(ctx, "plan.json"), PlanToJson(plan, hash));
  WriteFile(PathIn(ctx, "analyze.csv"), csv);
  return out;
}

std::vector<double> SweepAxis::Values() const {
  std::vector<double> v;
  const double span = (stop - start) / step;
  const int64_t count = static_cast<int64_t>(std::floor(span + 1e-9)) + 1;
  for (int64_t i = 0; i < count; ++i) v.push_back(start + i * step);
  return v;
}

SweepAxis ParseSweepAxis(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument,
                "sweep '" + std::string(text) + "': " + why);
  };
  if (parts.size() != 4) bad("expected axis:start:stop:step");
  SweepAxis ax;
  ax.name = parts[0];
  if (ax.name != "bits_per_packet" && ax.name != "device_count" &&
      ax.name != "blocklength" && ax.name != "tti") {
    bad("axis must be bits_per_packet, device_count, blocklength or tti");
  }
  double* dst[3] = {&ax.start, &ax.stop, &ax.step};
  for (int i = 0; i < 3; ++i) {
    size_t used = 0;
    try {
      *dst[i] = std::stod(parts[i + 1], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != parts[i + 1].size() || !std::isfinite(*dst[i])) {
      bad("malformed number '" + parts[i + 1] + "'");
    }
  }
  if (!(ax.step > 0.0)) bad("step must be positive");
  if (ax.stop < ax.start) bad("stop must be >= start");
  if (ax.Values().size() > 100'000) bad("too many points");
  return ax;
}

std::string CmdSweep(const ScenarioSpec& spec, const SweepAxis& axis,
                     const std::vector<std::string>& solvers,
                     const SolverOptions& opt, const RunContext& ctx) {
  spec.scenario.Validate();
  const std::vector<double> values = axis.Values();
  const bool common = axis.name == "tti" || axis.name == "blocklength";
  if (!common) {
    if (solvers.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one solver");
    }
    for (const std::string& s : solvers) {
      if (!IsKnownSolver(s)) {
        throw Error(ErrorCode::kInvalidArgument, "unknown solver '" + s + "'");
      }
    }
  }

  std::string header;
  if (common) {
    header = axis.name == "tti" ? "tti_s" : "blocklength_symbols";
    header += ",mean_blocklength_symbols,mean_tti_s,p_err,p_suc,e_mre,d_que_s,"
              "d_tra_s,d_pp_s,d_ota_s,period_ok,rate_ok,feasible";
  } else {
    header = axis.name;
    for (const std::string& s : solvers) {
      header += "," + s + "_status," + s + "_d_ota_s," + s + "_p_suc," + s +
                "_e_mre," + s + "_evaluations";
    }
  }

  auto point = [&](int i) -> std::string {
    const double v = values[i];
    const uint64_t seed = DeriveSeed(ctx.seed, "sweep/" + std::to_string(i));
    Row r;
    r << v;
    Scenario scn;
    if (axis.name == "device_count") {
      scn = WithDeviceCount(spec, static_cast<int>(std::lround(v)));
    } else {
      scn = spec.scenario;
      if (axis.name == "bits_per_packet") scn.bits_per_packet = v;
    }
    scn.Validate();
    if (common) {
      BlocklengthPlan plan;
      try {
        plan = axis.name == "tti" ? FixedTtiPlan(scn, v)
                                  : CommonBlocklengthPlan(scn, v);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasible) throw;
        for (int c = 0; c < 9; ++c) r << kNan;
        r << "false" << "false" << "false";
        return r.str();
      }
      const PacketMeans pm = MeanPacketStats(scn, plan);
      const DelayReport rep = Analyze(scn, plan);
      double que = 0, tra = 0, pp = 0, tti = 0;
      int packets = 0;
      for (int k = 0; k < scn.device_count(); ++k) {
        que += rep.devices[k].queuing;
        tra += rep.devices[k].transmission;
        pp += rep.devices[k].proc_prop;
        for (double t : plan.devices[k].ttis_s) {
          tti += t;
          ++packets;
        }
      }
      const double denom = std::max(1, scn.device_count());
      r << pm.blocklength << (packets ? tti / packets : kNan) << pm.p_err
        << pm.p_suc << pm.e_mre << que / denom << tra / denom << pp / denom
        << rep.average << Bool(rep.feasibility.period_ok)
        << Bool(rep.feasibility.rate_ok)
        << Bool(rep.feasibility.ok() && std::isfinite(rep.average));
      return r.str();
    }
    for (const std::string& s : solvers) {
      try {
        const SolveOutcome so = Solve(scn, s, opt, seed);
        if (so.found) {
          const PacketMeans pm = MeanPacketStats(scn, so.plan);
          r << "ok" << so.objective << pm.p_suc << pm.e_mre << so.evaluations;
        } else {
          r << "infeasible" << kInf << kNan << kNan << so.evaluations;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kCapExceeded) throw;
        r << "cap_exceeded" << kNan << kNan << kNan << uint64_t{0};
      }
    }
    return r.str();
  };

  const std::vector<std::string> rows =
      ParallelMap<std::string>(static_cast<int>(values.size()), point);
  std::string csv = Prelude(ScenarioHash(spec.scenario), ctx.seed) + header + "\n";
  for (const std::string& r : rows) csv += r;
  WriteScenario(spec.scenario, ctx);
  WriteFile(PathIn(ctx, "sweep.csv"), csv);
  return csv;
}

SolveOutcome CmdOptimize(const ScenarioSpec& spec, std::string_view solver,
                         const SolverOptions& opt, const RunContext& ctx) {
  const Scenario& scn = spec.scenario;
  scn.Validate();
  const uint64_t hash = ScenarioHash(scn);
  const std::string header =
      "solver,status,objective_s,evaluations,levels,subchannels_used\n";
  WriteScenario(scn, ctx);
  SolveOutcome out;
  try {
    out = Solve(scn, solver, opt, ctx.seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kCapExceeded) throw;
    Row r;
    r << std::string(solver) << "cap_exceeded" << kNan << uint64_t{0}
      << opt.levels << 0;
    WriteFile(PathIn(ctx, "optimize.csv"),
              Prelude(hash, ctx.seed) + header + r.str());
    throw;
  }
  int used = 0;
  for (const DevicePlan& dp : out.plan.devices) used += dp.subchannels;
  Row r;
  r << out.solver << (out.found ? "ok" : "infeasible") << out.objective
    << out.evaluations << opt.levels << used;
  WriteFile(PathIn(ctx, "optimize.csv"), Prelude(hash, ctx.seed) + header + r.str());
  if (out.found) WriteFile(PathIn(ctx, "plan.json"), PlanToJson(out.plan, hash));
  return out;
}

MarlRun CmdTrain(const ScenarioSpec& spec, const MarlConfig& cfg,
                 const RunContext& ctx) {
  const Scenario& scn = spec.scenario;
  const uint64_t hash = ScenarioHash(scn);
  MarlRun run = Train(scn, cfg, ctx.seed);

  std::string curve = Prelude(hash, ctx.seed) +
                      "episode,epsilon,reward,loss,smoothed_reward\n";
  double window = 0.0;
  for (size_t i = 0; i < run.rewards.size(); ++i) {
    window += run.rewards[i];
    if (i >= kSmoothingWindow) window -= run.rewards[i - kSmoothingWindow];
    const double n = std::min<size_t>(i + 1, kSmoothingWindow);
    Row r;
    r << static_cast<int64_t>(i) << run.epsilons[i] << run.rewards[i]
      << run.losses[i] << window / n;
    curve += r.str();
  }
  std::string evals = Prelude(hash, ctx.seed) + "episode,greedy_reward\n";
  for (size_t i = 0; i < run.eval_episodes.size(); ++i) {
    Row r;
    r << run.eval_episodes[i] << run.eval_rewards[i];
    evals += r.str();
  }
  Row s;
  s << (cfg.cooperative ? "marl" : "idqn")
    << static_cast<int>(run.groups.size()) << cfg.episodes << run.greedy_objective
    << run.greedy_reward << run.best_objective << run.selected_episode
    << run.updates;
  const std::string summary =
      Prelude(hash, ctx.seed) +
      "solver,agents,episodes,greedy_objective_s,greedy_reward,"
      "best_training_objective_s,selected_episode,updates\n" +
      s.str();

  WriteScenario(scn, ctx);
  WriteFile(PathIn(ctx, "train_curve.csv"), curve);
  WriteFile(PathIn(ctx, "train_eval.csv"), evals);
  WriteFile(PathIn(ctx, "train_summary.csv"), summary);
  WriteFile(PathIn(ctx, "plan.json"), PlanToJson(run.greedy_plan, hash));
  std::ofstream w(PathIn(ctx, "weights.bin"), std::ios::binary | std::ios::trunc);
  if (!w) throw Error(ErrorCode::kIo, "cannot write weights.bin");
  SaveWeights(w, run.agents);
  return run;
}

SimulateOutcome CmdSimulate(const ScenarioSpec& spec,
                            const BlocklengthPlan& plan, SimConfig cfg,
                            const RunContext& ctx) {
  const Scenario& scn = spec.scenario;
  cfg.seed = ctx.seed;
  const uint64_t hash = ScenarioHash(scn);
  SimulateOutcome out;
  out.stats = Simulate(scn, plan, cfg);
  const int num = scn.device_count();
  double analytic_avg = 0.0;
  double max_tv = 0.0;
  for (int k = 0; k < num; ++k) {
    std::vector<double> pi = {1.0};
    double delay = 0.0;
    if (!plan.devices[k].ttis_s.empty()) {
      const PacketStats st = ComputePacketStats(scn, plan, k);
      const QueueChain chain = BuildChain(scn.arrival(k), st.p_suc, cfg.fold);
      pi = cfg.fold == TailFold::kIdle ? SteadyStateClosedForm(chain)
                                       : SteadyStateSolve(chain);
      delay = ComputeDeviceDelay(scn, plan, k, pi).total;
    }
    out.analytic_delay.push_back(delay);
    out.tv_distance.push_back(TotalVariation(pi, out.stats.devices[k].occupancy));
    analytic_avg += delay / num;
    max_tv = std::max(max_tv, out.tv_distance.back());
  }

  std::string csv = Prelude(hash, ctx.seed) +
                    "device,max_len,analytic_delay_s,sim_delay_s,std_error_s,"
                    "tv_distance,attempts,collisions,deliveries\n";
  for (int k = 0; k < num; ++k) {
    const DeviceSimStats& d = out.stats.devices[k];
    Row r;
    r << k << scn.max_queue_length(k) << out.analytic_delay[k] << d.mean_delay
      << d.std_error << out.tv_distance[k] << d.attempts << d.collisions
      << d.deliveries;
    csv += r.str();
  }
  Row s;
  s << (cfg.mode == SimMode::kModel ? "model" : "protocol") << cfg.steps
    << out.stats.measured_steps << analytic_avg << out.stats.mean_delay
    << out.stats.std_error << out.stats.collision_rate << out.stats.mean_round_s
    << max_tv;
  const std::string summary =
      Prelude(hash, ctx.seed) +
      "mode,steps,measured_steps,analytic_delay_s,sim_delay_s,std_error_s,"
      "collision_rate,mean_round_s,max_tv_distance\n" +
      s.str();
  WriteScenario(scn, ctx);
  WriteFile(PathIn(ctx, "simulate.csv"), csv);
  WriteFile(PathIn(ctx, "simulate_summary.csv"), summary);
  return out;
}

}  // namespace adablock
