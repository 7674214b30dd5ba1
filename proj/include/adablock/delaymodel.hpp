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

// Over-the-air delay of a blocklength plan: queuing + transmission +
// propagation/processing, each multiplied through the expected number of
// grant-free attempts. All quantities are SI (seconds, hertz, watts).

#ifndef ADABLOCK_DELAYMODEL_HPP_
#define ADABLOCK_DELAYMODEL_HPP_

#include <span>
#include <vector>

#include "adablock/linkmodel.hpp"
#include "adablock/queueing.hpp"

namespace adablock {

struct DeviceProfile {
  double rate_per_s = 0;
  double distance_m = 1;
};

struct Scenario {
  std::vector<DeviceProfile> devices;
  RadioConstants constants;
  double period_s = 5e-3;
  int preamble_count = 500;
  int subchannel_count = 2000;
  double subchannel_bandwidth_hz = 100e3;
  double bits_per_packet = 256;
  double processing_delay_s = 10e-6;
  double eps_target = 1e-5;
  double light_speed_mps = 3e8;
  double cell_radius_m = 500;

  int device_count() const { return static_cast<int>(devices.size()); }
  ArrivalModel arrival(int k) const { return {devices[k].rate_per_s, period_s}; }
  int max_queue_length(int k) const { return MaxQueueLength(arrival(k)); }

  // Throws DomainError / Error(kSchema) on the first violated invariant.
  void Validate() const;
};

struct DevicePlan {
  std::vector<double> ttis_s;  // one TTI per queue position 1..M_Que
  int subchannels = 0;
};

struct BlocklengthPlan {
  std::vector<DevicePlan> devices;
};

// Throws Error(kInvalidArgument) if the plan does not match the scenario's
// per-device queue lengths.
void ValidatePlan(const Scenario& scn, const BlocklengthPlan& plan);

// n_{k,m} = T_{k,m} * |W_k| * W_subc, with m in [1, M_Que_k].
double BlocklengthOf(const Scenario& scn, const BlocklengthPlan& plan, int k,
                     int m);

double PropagationDelay(const DeviceProfile& profile, const Scenario& scn);

// D_P: three propagation legs plus processing, paid on every attempt.
double AccessOverhead(const DeviceProfile& profile, const Scenario& scn);

double PNoCollision(const Scenario& scn);

struct PacketStats {
  double p_one = 0;
  std::vector<double> p_err;
  std::vector<double> p_suc;
  std::vector<double> expected_retx;  // 1/p_suc, +inf when starved
  bool starved = false;               // some p_suc == 0
};

PacketStats ComputePacketStats(const Scenario& scn, const BlocklengthPlan& plan,
                               int k);

struct DeviceDelay {
  int max_len = 0;
  double queuing = 0;
  double transmission = 0;
  double proc_prop = 0;
  double total = 0;
  std::vector<double> per_packet_queuing;  // D_Que_{k,m}
  std::vector<double> steady;
  PacketStats stats;
};

// Uses the caller's stationary vector. Throws InfeasibleLink when starved.
DeviceDelay ComputeDeviceDelay(const Scenario& scn, const BlocklengthPlan& plan,
                               int k, std::span<const double> steady);

// Builds the chain from the plan's success probabilities and solves it with
// the closed form.
DeviceDelay ComputeDeviceDelay(const Scenario& scn, const BlocklengthPlan& plan,
                               int k);

// Mean of D_Ota over all K devices; idle devices contribute zero.
double AverageOtaDelay(const Scenario& scn, const BlocklengthPlan& plan);

struct Feasibility {
  bool period_ok = true;
  bool subchannels_ok = true;
  bool rate_ok = true;
  std::vector<bool> device_period_ok;
  std::vector<bool> device_rate_ok;
  int subchannels_used = 0;

  bool ok() const { return period_ok && subchannels_ok && rate_ok; }
};

// Per-device halves of the period and rate constraints.
bool DevicePeriodOk(const Scenario& scn, const DevicePlan& dp);
bool DeviceRateOk(const Scenario& scn, const DevicePlan& dp, int k);

// strict_subchannels additionally requires every subchannel to be assigned.
Feasibility CheckFeasibility(const Scenario& scn, const BlocklengthPlan& plan,
                             bool strict_subchannels = false);

// Average delay when the plan is feasible and no link starves, +inf
// otherwise. This is what the solvers minimize.
double PlanObjective(const Scenario& scn, const BlocklengthPlan& plan);

// Devices with the same max queue length, ordered by that length; idle
// devices are left out.
struct QueueClass {
  int max_len = 0;
  std::vector<int> members;
};
std::vector<QueueClass> PartitionByQueueLength(const Scenario& scn);

struct DelayReport {
  std::vector<DeviceDelay> devices;
  std::vector<bool> starved;
  double average = 0;  // +inf if any device starves
  Feasibility feasibility;
  std::vector<QueueClass> classes;
  std::vector<int> transmission_cost;  // zeta_Trans per queue class
  int subchannel_cost = 0;             // zeta_Subc
};

// Full decomposition. Never throws for infeasible plans; starvation and
// constraint violations are reported in the result.
DelayReport Analyze(const Scenario& scn, const BlocklengthPlan& plan);

}  // namespace adablock

#endif  // ADABLOCK_DELAYMODEL_HPP_
