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


// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance <cli-binary> <data-dir> <work-dir> [criteria, e.g. 1,5]

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "adablock/access.hpp"
#include "adablock/baselines.hpp"
#include "adablock/delaymodel.hpp"
#include "adablock/io.hpp"
#include "adablock/linkmodel.hpp"
#include "adablock/marl.hpp"
#include "adablock/queueing.hpp"
#include "adablock/simulate.hpp"
#include "oracles.hpp"

using namespace adablock;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kChainTol = 1e-10;
constexpr double kChainBudgetS = 10;
constexpr double kQuadTol = 1e-8;
constexpr double kQuadBudgetS = 30;
constexpr double kRoundTripTol = 1e-9;
constexpr double kEnumTol = 1e-12;
constexpr double kBigContention = 0.36825;
constexpr double kBigContentionTol = 1e-5;
constexpr double kTvTol = 0.01;
constexpr double kSeLimit = 3.0;
constexpr double kSimBudgetS = 120;
constexpr double kRetxFlatTol = 0.01;  // relative change per 100 symbols
constexpr double kOracleGap = 0.05;
constexpr double kTrainBudgetS = 600;
// Smoothed reward: trailing mean over a tenth of the run, read at the end
// of each tenth; a later reading may sit below an earlier one by at most
// this share of the total rise.
constexpr double kSmoothSlack = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- 1: stationary distribution -----------------------------------------

// Builds the queue chain from its definition and solves pi (P - I) = 0 with
// sum(pi) = 1 in extended precision.
std::vector<double> SolveChain(double load, const std::vector<double>& suc) {
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const int m = static_cast<int>(suc.size());
  const int n = m + 1;
  Mat p = Mat::Zero(n, n);
  long double arrive = 0;
  long double pmf = std::exp(-static_cast<long double>(load));
  for (int a = 1; a <= m; ++a) {
    pmf = pmf * load / a;
    p(0, a) = pmf;
    arrive += pmf;
  }
  p(0, 0) = 1 - arrive;
  for (int i = 1; i <= m; ++i) {
    p(i, i - 1) = suc[i - 1];
    p(i, i) = 1 - static_cast<long double>(suc[i - 1]);
  }
  Mat a = p.transpose() - Mat::Identity(n, n);
  a.row(n - 1).setOnes();
  Vec b = Vec::Zero(n);
  b(n - 1) = 1;
  const Vec pi = a.fullPivLu().solve(b);
  return {pi.data(), pi.data() + n};
}

Outcome Criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> load(0.01, 6.0), suc(0.01, 1.0);
  const double period = 5e-3;
  double worst = 0;
  int instances = 0;
  std::set<int> lengths;
  while (instances < 1000) {
    const ArrivalModel model{load(gen) / period, period};
    const int m = MaxQueueLength(model);
    if (m < 1 || m > 6) continue;
    std::vector<double> s(m);
    for (double& v : s) v = suc(gen);
    const std::vector<double> closed =
        SteadyStateClosedForm(BuildChain(model, s));
    const std::vector<double> solved = SolveChain(model.mean_load(), s);
    for (int i = 0; i <= m; ++i) {
      worst = std::max(worst, std::abs(closed[i] - solved[i]));
    }
    lengths.insert(m);
    ++instances;
  }
  const double t = Seconds(t0);
  return {worst < kChainTol && t < kChainBudgetS && lengths.size() == 6,
          "instances=1000 queue_lengths=1..6 max_abs_diff=" + Fmt("%.3e", worst) +
              " time_s=" + Fmt("%.2f", t)};
}

// ---- 2: fading-averaged error -------------------------------------------

Outcome Criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  RadioConstants rc;  // mean SNR 10
  const double c = rc.mean_snr();
  double worst = 0;
  int points = 0;
  for (int i = 0; i < 50; ++i) {
    const double n = 20.0 + i * (2000.0 - 20.0) / 49;
    for (int j = 0; j < 50; ++j) {
      const double b = 16.0 + j * (1024.0 - 16.0) / 49;
      const double lib = ExpectedErrorProbability(n, b, rc);
      worst = std::max(worst, std::abs(lib - oracle::AveragedError(n, b, c)));
      ++points;
    }
  }
  const double t = Seconds(t0);
  return {std::abs(c - 10.0) < 1e-12 && points == 2500 && worst < kQuadTol &&
              t < kQuadBudgetS,
          "points=2500 n=20..2000 B=16..1024 mean_snr=" + Fmt("%g", c) +
              " max_abs_diff=" + Fmt("%.3e", worst) + " time_s=" +
              Fmt("%.2f", t)};
}

// ---- 3: rate and error round trip ---------------------------------------

Outcome Criterion3() {
  double worst_eps = 0, worst_rate = 0;
  for (double snr : {1.0, 10.0, 100.0}) {
    for (double n : {50.0, 200.0, 1000.0}) {
      for (double eps : {1e-1, 1e-3, 1e-5}) {
        const double r = AchievableRate(snr, n, eps);
        const double back = ErrorProbabilityExact(snr, n, r);
        worst_eps = std::max(worst_eps, std::abs(back - eps));
        worst_rate =
            std::max(worst_rate, std::abs(AchievableRate(snr, n, back) - r));
      }
    }
  }
  return {worst_eps < kRoundTripTol && worst_rate < kRoundTripTol,
          "cases=27 max_eps_diff=" + Fmt("%.3e", worst_eps) +
              " max_rate_diff=" + Fmt("%.3e", worst_rate)};
}

// ---- 4: contention ------------------------------------------------------

Outcome Criterion4() {
  double worst = 0;
  for (int k = 1; k <= 4; ++k) {
    for (int m = 1; m <= 4; ++m) {
      worst = std::max(worst, std::abs(PNoCollision({k, m}) -
                                       oracle::NoCollisionByEnumeration(k, m)));
    }
  }
  const double big = PNoCollision({500, 500});
  const oracle::Big exact =
      boost::multiprecision::pow(oracle::Big(499) / 500, 499);
  const double exact_d = static_cast<double>(exact);
  return {worst < kEnumTol && std::abs(big - kBigContention) < kBigContentionTol &&
              std::abs(big - exact_d) < 1e-14,
          "enum_max_diff=" + Fmt("%.3e", worst) + " p(500,500)=" +
              Fmt("%.10f", big) + " multiprecision=" + Fmt("%.10f", exact_d)};
}

// ---- 5: simulator agreement ---------------------------------------------

Outcome Criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> rate(20, 1000), dist(20, 500),
      tti(0.3e-3, 1.5e-3);
  std::uniform_int_distribution<int> count(1, 4), subch(1, 4);
  double worst_tv = 0, worst_z = 0;
  int devices = 0;
  for (int inst = 0; inst < 20; ++inst) {
    Scenario s;
    s.preamble_count = 10;
    s.subchannel_count = 100;
    const int k_count = count(gen);
    for (int k = 0; k < k_count; ++k) s.devices.push_back({rate(gen), dist(gen)});
    BlocklengthPlan plan;
    for (int k = 0; k < k_count; ++k) {
      DevicePlan dp;
      dp.subchannels = 1 << subch(gen);
      dp.ttis_s.resize(s.max_queue_length(k));
      for (double& t : dp.ttis_s) t = tti(gen);
      plan.devices.push_back(dp);
    }
    SimConfig cfg;
    cfg.steps = 1'000'000;
    cfg.seed = 1000 + inst;
    const SimStats st = RunModelMode(s, plan, cfg);
    double analytic = 0;
    for (int k = 0; k < k_count; ++k) {
      const DeviceDelay d = ComputeDeviceDelay(s, plan, k);
      analytic += d.total / k_count;
      worst_tv = std::max(worst_tv, TotalVariation(d.steady, st.devices[k].occupancy));
      ++devices;
    }
    worst_z = std::max(worst_z, std::abs(st.mean_delay - analytic) / st.std_error);
  }
  const double t = Seconds(t0);
  return {worst_tv < kTvTol && worst_z < kSeLimit && t < kSimBudgetS,
          "instances=20 devices=" + std::to_string(devices) +
              " steps=1e6 max_tv=" + Fmt("%.4f", worst_tv) +
              " max_delay_z=" + Fmt("%.2f", worst_z) + " time_s=" +
              Fmt("%.1f", t)};
}

// ---- 6: blocklength tradeoff --------------------------------------------

Outcome Criterion6(const std::string& data) {
  // One device on one subchannel: n = T * W.
  Scenario s = LoadScenario(data + "/single.json").scenario;
  s.subchannel_count = 1;
  const int m = s.max_queue_length(0);
  const double lo = 0.3e-3, hi = s.period_s;
  std::vector<double> d(40);
  for (int i = 0; i < 40; ++i) {
    const double t = lo * std::pow(hi / lo, i / 39.0);
    BlocklengthPlan plan{{{std::vector<double>(m, t), 1}}};
    d[i] = ComputeDeviceDelay(s, plan, 0).total;
  }
  const auto best = std::min_element(d.begin(), d.end()) - d.begin();
  const bool interior = best > 0 && best < 39 && d[best] < d.front() &&
                        d[best] < d.back() && std::isfinite(d.front());
  const double t_best = lo * std::pow(hi / lo, best / 39.0);

  // Retransmissions and success against blocklength for several loads.
  const RadioConstants rc;
  bool monotone = true;
  for (double bits : {128.0, 256.0, 300.0}) {
    for (int k : {1, 100, 500}) {
      const double p_one = PNoCollision({k, 500});
      double prev_m = INFINITY, prev_s = 0;
      for (int n = 60; n <= 2000; n += 10) {
        const AccessPoint ap =
            MakeAccessPoint(p_one, ExpectedErrorProbability(n, bits, rc));
        monotone = monotone && ap.expected_retx < prev_m && ap.p_suc > prev_s;
        prev_m = ap.expected_retx;
        prev_s = ap.p_suc;
      }
    }
  }
  double flat = 0;
  for (int n = 601; n + 100 <= 3000; ++n) {
    const double a = ExpectedRetransmissions(
        PSuccess(1.0, ExpectedErrorProbability(n, s.bits_per_packet, rc)));
    const double b = ExpectedRetransmissions(
        PSuccess(1.0, ExpectedErrorProbability(n + 100, s.bits_per_packet, rc)));
    flat = std::max(flat, (a - b) / a);
  }
  return {interior && monotone && flat < kRetxFlatTol,
          "grid=40 tti=0.3..5ms argmin_tti_s=" + Fmt("%.3e", t_best) +
              " d_min_s=" + Fmt("%.4e", d[best]) + " d_ends_s=" +
              Fmt("%.4e", d.front()) + "/" + Fmt("%.4e", d.back()) +
              " retx_monotone=" + (monotone ? "yes" : "no") +
              " max_retx_change_per_100_above_600=" + Fmt("%.3f%%", 100 * flat)};
}

// ---- 7: solver ordering on the toy instance -----------------------------

Outcome Criterion7(const std::string& data) {
  const Scenario s = LoadScenario(data + "/toy.json").scenario;
  const SearchSpace space = MakeSearchSpace(s, 5);
  const SearchResult ex = ExhaustiveSearch(s, space);
  const SearchResult rnd = RandomSearch(s, space, 1000, 1);
  const double lte = PlanObjective(s, FixedTtiPlan(s, kLteTtiS));
  const double nr = PlanObjective(s, FixedTtiPlan(s, kNrTtiS));

  const int groups = static_cast<int>(GroupDevices(s).size());
  MarlConfig cfg;
  cfg.tti_levels = 5;
  cfg.episodes = 15000;
  cfg.updates_per_step = 2;
  cfg.omega3 = 3 * cfg.omega1 * s.period_s * groups;
  const auto t0 = std::chrono::steady_clock::now();
  const MarlRun run = Train(s, cfg, 2);
  const double t = Seconds(t0);
  const double dqn = run.greedy_objective;

  // Smoothed reward readings.
  const int n = static_cast<int>(run.rewards.size());
  const int window = n / 10;
  std::vector<double> readings;
  for (int end = window; end <= n; end += window) {
    double sum = 0;
    for (int i = end - window; i < end; ++i) sum += run.rewards[i];
    readings.push_back(sum / window);
  }
  const double rise = readings.back() - readings.front();
  bool smooth = rise > 0;
  double worst_drop = 0;
  for (size_t i = 1; i < readings.size(); ++i) {
    const double peak = *std::max_element(readings.begin(), readings.begin() + i);
    worst_drop = std::max(worst_drop, peak - readings[i]);
  }
  smooth = smooth && worst_drop <= kSmoothSlack * rise;

  const bool shape = s.device_count() <= 10 && groups <= 3 &&
                     s.subchannel_count == 20 && s.preamble_count == 10;
  const bool order = ex.found && ex.objective <= dqn && dqn <= rnd.objective &&
                     dqn <= (1 + kOracleGap) * ex.objective && dqn < lte &&
                     dqn < nr;
  return {shape && order && smooth && t < kTrainBudgetS,
          "K=" + std::to_string(s.device_count()) + " G=" +
              std::to_string(groups) + " exhaustive=" + Fmt("%.6e", ex.objective) +
              " mdqn=" + Fmt("%.6e", dqn) + " random1000=" +
              Fmt("%.6e", rnd.objective) + " lte=" + Fmt("%.6e", lte) +
              " nr=" + Fmt("%.6e", nr) + " gap=" +
              Fmt("%.2f%%", 100 * (dqn / ex.objective - 1)) +
              " smoothed_rise=" + Fmt("%.1f", rise) + " worst_drop=" +
              Fmt("%.1f", worst_drop) + " train_s=" + Fmt("%.1f", t)};
}

// ---- 8: scaled ordering -------------------------------------------------

Outcome Criterion8(const std::string& data) {
  const ScenarioSpec spec = LoadScenario(data + "/scaled.json");
  std::vector<double> ada, lte, nr;
  bool strict = true;
  for (int k : {20, 50, 100}) {
    const Scenario s = WithDeviceCount(spec, k);
    const SearchResult r = OracleSearch(s, MakeSearchSpace(s, 20), 1'000'000'000);
    ada.push_back(r.found ? r.objective : INFINITY);
    lte.push_back(PlanObjective(s, FixedTtiPlan(s, kLteTtiS)));
    nr.push_back(PlanObjective(s, FixedTtiPlan(s, kNrTtiS)));
    strict = strict && ada.back() < lte.back() && ada.back() < nr.back();
  }
  auto rising = [](const std::vector<double>& v) {
    return std::is_sorted(v.begin(), v.end());
  };
  std::string detail = "K=20/50/100 M_Pre=" +
                       std::to_string(spec.scenario.preamble_count) +
                       " M_Subc=" + std::to_string(spec.scenario.subchannel_count);
  for (size_t i = 0; i < ada.size(); ++i) {
    detail += " [" + Fmt("%.5e", ada[i]) + " " + Fmt("%.5e", nr[i]) + " " +
              Fmt("%.5e", lte[i]) + "]";
  }
  detail += " (oracle nr lte)";
  return {strict && rising(ada) && rising(lte) && rising(nr), detail};
}

// ---- 9: determinism -----------------------------------------------------

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome Criterion9(const std::string& cli, const std::string& data,
                   const std::string& work) {
  const std::string toy = data + "/toy.json";
  const std::vector<std::string> commands = {
      "analyze --baseline nr",
      "sweep --sweep bits_per_packet:200:400:100 --solver lte,nr,random,local "
      "--levels 4 --samples 100 --iters 50",
      "sweep --sweep tti:0.0002:0.002:0.0003",
      "optimize --solver random --levels 5 --samples 300",
      "optimize --solver local --levels 5 --iters 200",
      "train --solver marl --levels 5 --episodes 150",
      "train --solver idqn --levels 5 --episodes 150",
      "simulate --baseline nr --mode model --steps 20000",
      "simulate --baseline lte --mode protocol --steps 20000",
  };
  int files = 0;
  std::string bad;
  for (size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = fs::path(work) / ("det" + std::to_string(c) + "_" +
                                             std::to_string(rep));
      fs::remove_all(dir);
      const std::string line = "\"" + cli + "\" " + commands[c] +
                               " --scenario \"" + toy + "\" --seed 42 --out \"" +
                               dir.string() + "\" > /dev/null";
      // Exit 2 (no feasible plan) still writes its CSVs.
      const int status = std::system(line.c_str());
      if (!WIFEXITED(status) || (WEXITSTATUS(status) != 0 && WEXITSTATUS(status) != 2)) {
        bad += " exit:" + commands[c];
      }
      dirs.push_back(dir);
    }
    if (!fs::exists(dirs[0])) continue;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (Slurp(entry.path()) != Slurp(dirs[1] / entry.path().filename())) {
        bad += " diff:" + entry.path().filename().string();
      }
    }
  }
  return {bad.empty() && files > 0,
          "commands=" + std::to_string(commands.size()) +
              " csv_files_compared=" + std::to_string(files) +
              (bad.empty() ? "" : " failures:" + bad)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <cli> <data-dir> <work-dir> [criteria]\n",
                 argv[0]);
    return 2;
  }
  const std::string cli = argv[1], data = argv[2], work = argv[3];
  fs::create_directories(work);
  std::set<int> only;
  if (argc > 4) {
    std::stringstream ss(argv[4]);
    for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"steady-state closed form vs linear solve", Criterion1},
      {"averaged error vs adaptive quadrature", Criterion2},
      {"rate/error round trip", Criterion3},
      {"contention vs enumeration", Criterion4},
      {"model-mode simulator agreement", Criterion5},
      {"blocklength tradeoff", [&] { return Criterion6(data); }},
      {"solver ordering on the toy instance", [&] { return Criterion7(data); }},
      {"scaled ordering over device count", [&] { return Criterion8(data); }},
      {"byte-identical reruns", [&] { return Criterion9(cli, data, work); }},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
