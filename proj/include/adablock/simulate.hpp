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

// Discrete-time Monte-Carlo of the per-device queue chains.
//
// Model mode runs each device's chain on its own stream with the analytic
// success probabilities (collision term included as a Bernoulli factor).
// Protocol mode couples the devices: in every round each device holding a
// packet draws a preamble, shared preambles collide, and the survivors fail
// independently with the packet's error probability. Only active devices
// contend, so protocol mode measures the gap left by the analytic
// all-devices-contend approximation.
//
// Delay estimates reuse the analytic decomposition with every expectation
// replaced by its empirical counterpart: state occupancy for pi, and
// attempts-per-success counted per queue position for E[M_Re]. Each attempt
// at position m costs T_m + D_P. Standard errors come from batch means.

#ifndef ADABLOCK_SIMULATE_HPP_
#define ADABLOCK_SIMULATE_HPP_

#include <cstdint>
#include <vector>

#include "adablock/delaymodel.hpp"

namespace adablock {

enum class SimMode { kModel, kProtocol };

struct SimConfig {
  SimMode mode = SimMode::kModel;
  int64_t steps = 1'000'000;
  uint64_t seed = 1;
  int64_t warmup = -1;  // -1: 10% of steps
  int batches = 20;
  TailFold fold = TailFold::kIdle;
  // Protocol mode only: idle devices refill to a full queue before each
  // round, so all K devices contend every time.
  bool always_active = false;

  int64_t effective_warmup() const { return warmup < 0 ? steps / 10 : warmup; }
  void Validate() const;
};

inline constexpr int kAttemptHistogramBins = 64;  // last bin is ">= 64"

struct DeviceSimStats {
  std::vector<double> occupancy;  // empirical pi, sums to 1
  double mean_delay = 0;
  double std_error = 0;
  std::vector<int64_t> attempt_histogram;  // index = attempts for a packet
  int64_t attempts = 0;
  int64_t collisions = 0;
  int64_t deliveries = 0;
};

struct SimStats {
  SimMode mode = SimMode::kModel;
  std::vector<DeviceSimStats> devices;
  double mean_delay = 0;  // average over all K devices
  double std_error = 0;
  double collision_rate = 0;   // collided attempts / attempts
  double mean_round_s = 0;     // protocol mode: mean global slot length
  int64_t measured_steps = 0;  // steps after warmup
};

SimStats RunModelMode(const Scenario& scn, const BlocklengthPlan& plan,
                      const SimConfig& cfg);

SimStats RunProtocolMode(const Scenario& scn, const BlocklengthPlan& plan,
                         const SimConfig& cfg);

// Dispatches on cfg.mode.
SimStats Simulate(const Scenario& scn, const BlocklengthPlan& plan,
                  const SimConfig& cfg);

// Total-variation distance between two probability vectors of equal length.
double TotalVariation(const std::vector<double>& a,
                      const std::vector<double>& b);

}  // namespace adablock

#endif  // ADABLOCK_SIMULATE_HPP_
