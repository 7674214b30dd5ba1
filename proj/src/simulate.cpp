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

#include "adablock/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adablock/errors.hpp"
#include "adablock/rng.hpp"

namespace adablock {
namespace {

struct Counters {
  std::vector<int64_t> occupancy;  // by state
  std::vector<int64_t> attempts;   // by queue position (index m)
  std::vector<int64_t> successes;

  explicit Counters(int len)
      : occupancy(len + 1, 0), attempts(len + 1, 0), successes(len + 1, 0) {}

  void Add(const Counters& o) {
    for (size_t i = 0; i < occupancy.size(); ++i) {
      occupancy[i] += o.occupancy[i];
      attempts[i] += o.attempts[i];
      successes[i] += o.successes[i];
    }
  }
};

struct DeviceRun {
  int len = 0;
  std::vector<double> ttis;
  double overhead = 0;
  double p_one = 1;
  std::vector<double> p_err;
  std::vector<double> arrive_cdf;  // cumulative row 0 of the chain
  Rng rng;
  int state = 0;
  int pending_attempts = 0;
  std::vector<Counters> batches;
  DeviceSimStats stats;

  explicit DeviceRun(uint64_t seed) : rng(seed) {}

  void Arrive() {
    const double x = rng.Uniform();
    int next = len;
    for (int m = 0; m <= len; ++m) {
      if (x < arrive_cdf[m]) {
        next = m;
        break;
      }
    }
    state = next;
  }

  // Outcome of an attempt at the current state that got past contention.
  void Finish(bool success, bool measuring, Counters* c) {
    ++pending_attempts;
    if (measuring) {
      ++c->attempts[state];
      ++stats.attempts;
    }
    if (!success) return;
    if (measuring) {
      ++c->successes[state];
      ++stats.deliveries;
      ++stats.attempt_histogram[std::min(pending_attempts,
                                         kAttemptHistogramBins - 1)];
    }
    pending_attempts = 0;
    --state;
  }
};

// Delay estimate from empirical occupancy and attempts per success.
double EstimateDelay(const DeviceRun& d, const Counters& c,
                     const Counters* fallback) {
  if (d.len == 0) return 0.0;
  int64_t total = 0;
  for (int64_t v : c.occupancy) total += v;
  std::vector<double> service(d.len + 1, 0.0);
  for (int m = 1; m <= d.len; ++m) {
    double ratio;
    if (c.successes[m] > 0) {
      ratio = static_cast<double>(c.attempts[m]) / c.successes[m];
    } else if (fallback != nullptr && fallback->successes[m] > 0) {
      ratio = static_cast<double>(fallback->attempts[m]) / fallback->successes[m];
    } else {
      ratio = std::max<double>(1.0, c.attempts[m]);
    }
    service[m] = (d.ttis[m - 1] + d.overhead) * ratio;
  }
  double delay = 0.0;
  double ahead = 0.0;
  for (int m = 1; m <= d.len; ++m) {
    const double pi_m =
        total > 0 ? static_cast<double>(c.occupancy[m]) / total : 0.0;
    delay += pi_m * ahead + service[m];
    ahead += service[m];
  }
  return delay;
}

std::vector<DeviceRun> Prepare(const Scenario& scn, const BlocklengthPlan& plan,
                               const SimConfig& cfg) {
  scn.Validate();
  ValidatePlan(scn, plan);
  cfg.Validate();
  std::vector<DeviceRun> runs;
  runs.reserve(scn.devices.size());
  for (int k = 0; k < scn.device_count(); ++k) {
    DeviceRun d(DeriveSeed(cfg.seed, "simulate/device/" + std::to_string(k)));
    d.len = static_cast<int>(plan.devices[k].ttis_s.size());
    d.ttis = plan.devices[k].ttis_s;
    d.overhead = AccessOverhead(scn.devices[k], scn);
    const PacketStats st = ComputePacketStats(scn, plan, k);
    if (st.starved) {
      throw InfeasibleLink("device " + std::to_string(k) +
                           " cannot deliver packets; nothing to simulate");
    }
    d.p_one = st.p_one;
    d.p_err = st.p_err;
    const QueueChain chain = BuildChain(scn.arrival(k), st.p_suc, cfg.fold);
    d.arrive_cdf.resize(d.len + 1);
    double acc = 0.0;
    for (int m = 0; m <= d.len; ++m) {
      acc += chain.transition(0, m);
      d.arrive_cdf[m] = acc;
    }
    d.batches.assign(cfg.batches, Counters(d.len));
    d.stats.attempt_histogram.assign(kAttemptHistogramBins, 0);
    runs.push_back(std::move(d));
  }
  return runs;
}

SimStats Summarize(std::vector<DeviceRun>& runs, const SimConfig& cfg,
                   int64_t measured) {
  SimStats out;
  out.mode = cfg.mode;
  out.measured_steps = measured;
  const int num = static_cast<int>(runs.size());
  std::vector<double> batch_avg(cfg.batches, 0.0);
  int64_t attempts = 0;
  int64_t collisions = 0;
  for (DeviceRun& d : runs) {
    Counters all(d.len);
    for (const Counters& c : d.batches) all.Add(c);
    int64_t total = 0;
    for (int64_t v : all.occupancy) total += v;
    d.stats.occupancy.resize(d.len + 1);
    for (int m = 0; m <= d.len; ++m) {
      d.stats.occupancy[m] = static_cast<double>(all.occupancy[m]) / total;
    }
    d.stats.mean_delay = EstimateDelay(d, all, nullptr);
    double s = 0.0;
    double s2 = 0.0;
    for (int b = 0; b < cfg.batches; ++b) {
      const double est = EstimateDelay(d, d.batches[b], &all);
      batch_avg[b] += est / num;
      s += est;
      s2 += est * est;
    }
    const double nb = cfg.batches;
    const double var = std::max(0.0, (s2 - s * s / nb) / (nb - 1.0));
    d.stats.std_error = std::sqrt(var / nb);
    out.mean_delay += d.stats.mean_delay / num;
    attempts += d.stats.attempts;
    collisions += d.stats.collisions;
    out.devices.push_back(std::move(d.stats));
  }
  double s = 0.0;
  double s2 = 0.0;
  for (double v : batch_avg) {
    s += v;
    s2 += v * v;
  }
  const double nb = cfg.batches;
  out.std_error =
      num > 0 ? std::sqrt(std::max(0.0, (s2 - s * s / nb) / (nb - 1.0)) / nb)
              : 0.0;
  out.collision_rate =
      attempts > 0 ? static_cast<double>(collisions) / attempts : 0.0;
  return out;
}

int BatchOf(int64_t t, int64_t warmup, int64_t measured, int batches) {
  return static_cast<int>((t - warmup) * batches / measured);
}

}  // namespace

void SimConfig::Validate() const {
  if (steps <= 0) throw Error(ErrorCode::kInvalidArgument, "steps must be > 0");
  const int64_t w = effective_warmup();
  if (w < 0 || w >= steps) {
    throw Error(ErrorCode::kInvalidArgument, "warmup must lie in [0, steps)");
  }
  if (batches < 2 || batches > steps - w) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 2 batches and one step per batch");
  }
}

SimStats RunModelMode(const Scenario& scn, const BlocklengthPlan& plan,
                      const SimConfig& cfg) {
  std::vector<DeviceRun> runs = Prepare(scn, plan, cfg);
  const int64_t warmup = cfg.effective_warmup();
  const int64_t measured = cfg.steps - warmup;
  for (DeviceRun& d : runs) {
    if (d.len == 0) {
      d.batches[0].occupancy[0] = measured;
      continue;
    }
    for (int64_t t = 0; t < cfg.steps; ++t) {
      const bool measuring = t >= warmup;
      Counters* c = measuring
                        ? &d.batches[BatchOf(t, warmup, measured, cfg.batches)]
                        : nullptr;
      if (measuring) ++c->occupancy[d.state];
      if (d.state == 0) {
        d.Arrive();
        continue;
      }
      if (!d.rng.Bernoulli(d.p_one)) {
        if (measuring) ++d.stats.collisions;
        d.Finish(false, measuring, c);
        continue;
      }
      d.Finish(d.rng.Bernoulli(1.0 - d.p_err[d.state - 1]), measuring, c);
    }
  }
  return Summarize(runs, cfg, measured);
}

SimStats RunProtocolMode(const Scenario& scn, const BlocklengthPlan& plan,
                         const SimConfig& cfg) {
  std::vector<DeviceRun> runs = Prepare(scn, plan, cfg);
  const int64_t warmup = cfg.effective_warmup();
  const int64_t measured = cfg.steps - warmup;
  const int num = static_cast<int>(runs.size());
  std::vector<int> picks(scn.preamble_count, 0);
  std::vector<int> chosen(num, -1);
  double round_time = 0.0;
  int64_t busy_rounds = 0;

  for (int64_t t = 0; t < cfg.steps; ++t) {
    const bool measuring = t >= warmup;
    const int b = measuring ? BatchOf(t, warmup, measured, cfg.batches) : 0;
    double slot = 0.0;
    for (int k = 0; k < num; ++k) {
      DeviceRun& d = runs[k];
      chosen[k] = -1;
      if (cfg.always_active && d.state == 0 && d.len > 0) d.state = d.len;
      if (measuring) ++d.batches[b].occupancy[d.state];
      if (d.state == 0) continue;
      chosen[k] = static_cast<int>(d.rng.Below(scn.preamble_count));
      ++picks[chosen[k]];
      slot = std::max(slot, d.ttis[d.state - 1] + d.overhead);
    }
    for (int k = 0; k < num; ++k) {
      DeviceRun& d = runs[k];
      if (chosen[k] < 0) {
        if (d.state == 0 && d.len > 0) d.Arrive();
        continue;
      }
      Counters* c = measuring ? &d.batches[b] : nullptr;
      if (picks[chosen[k]] > 1) {
        if (measuring) ++d.stats.collisions;
        d.Finish(false, measuring, c);
      } else {
        d.Finish(d.rng.Bernoulli(1.0 - d.p_err[d.state - 1]), measuring, c);
      }
    }
    for (int k = 0; k < num; ++k) {
      if (chosen[k] >= 0) picks[chosen[k]] = 0;
    }
    if (measuring && slot > 0.0) {
      round_time += slot;
      ++busy_rounds;
    }
  }
  SimStats out = Summarize(runs, cfg, measured);
  out.mean_round_s = busy_rounds > 0 ? round_time / busy_rounds : 0.0;
  return out;
}

SimStats Simulate(const Scenario& scn, const BlocklengthPlan& plan,
                  const SimConfig& cfg) {
  return cfg.mode == SimMode::kModel ? RunModelMode(scn, plan, cfg)
                                     : RunProtocolMode(scn, plan, cfg);
}

double TotalVariation(const std::vector<double>& a,
                      const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vectors differ in length");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace adablock
