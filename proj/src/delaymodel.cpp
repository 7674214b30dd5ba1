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

#include "adablock/delaymodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "adablock/access.hpp"
#include "adablock/errors.hpp"

namespace adablock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on the period constraint so that sums of grid TTIs equal to T_max
// are not rejected by rounding.
constexpr double kPeriodSlackS = 1e-12;

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kSchema, what);
}

}  // namespace

void Scenario::Validate() const {
  constants.Validate();
  if (!(period_s > 0.0)) SchemaError("period must be positive");
  if (preamble_count < 1) SchemaError("preamble count must be >= 1");
  if (subchannel_count < 1) SchemaError("subchannel count must be >= 1");
  if (!(subchannel_bandwidth_hz > 0.0)) {
    SchemaError("subchannel bandwidth must be positive");
  }
  if (!(bits_per_packet >= 1.0)) SchemaError("bits per packet must be >= 1");
  if (!(processing_delay_s >= 0.0)) {
    SchemaError("processing delay must be >= 0");
  }
  if (!(eps_target > 0.0 && eps_target < 0.5)) {
    SchemaError("eps_target must lie in (0, 0.5)");
  }
  if (!(light_speed_mps > 0.0)) SchemaError("light speed must be positive");
  if (!(cell_radius_m > 0.0)) SchemaError("cell radius must be positive");
  for (size_t k = 0; k < devices.size(); ++k) {
    const auto& d = devices[k];
    if (!(d.distance_m > 0.0 && d.distance_m <= cell_radius_m)) {
      SchemaError("device " + std::to_string(k) +
                  ": distance must lie in (0, cell_radius]");
    }
    if (!(d.rate_per_s >= 0.0) || !std::isfinite(d.rate_per_s)) {
      SchemaError("device " + std::to_string(k) + ": rate must be >= 0");
    }
  }
}

void ValidatePlan(const Scenario& scn, const BlocklengthPlan& plan) {
  if (plan.devices.size() != scn.devices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "plan covers " + std::to_string(plan.devices.size()) +
                    " devices, scenario has " +
                    std::to_string(scn.devices.size()));
  }
  for (int k = 0; k < scn.device_count(); ++k) {
    const int len = scn.max_queue_length(k);
    const DevicePlan& dp = plan.devices[k];
    if (static_cast<int>(dp.ttis_s.size()) != len) {
      throw Error(ErrorCode::kInvalidArgument,
                  "device " + std::to_string(k) + " needs " +
                      std::to_string(len) + " TTIs, plan has " +
                      std::to_string(dp.ttis_s.size()));
    }
    if (len > 0 && dp.subchannels < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "device " + std::to_string(k) + " has no subchannels");
    }
    for (double t : dp.ttis_s) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "device " + std::to_string(k) + " has a non-positive TTI");
      }
    }
  }
}

double BlocklengthOf(const Scenario& scn, const BlocklengthPlan& plan, int k,
                     int m) {
  if (k < 0 || k >= static_cast<int>(plan.devices.size())) {
    throw Error(ErrorCode::kInvalidArgument, "device index out of range");
  }
  const DevicePlan& dp = plan.devices[k];
  if (m < 1 || m > static_cast<int>(dp.ttis_s.size())) {
    throw Error(ErrorCode::kInvalidArgument, "packet index out of range");
  }
  return dp.ttis_s[m - 1] * dp.subchannels * scn.subchannel_bandwidth_hz;
}

double PropagationDelay(const DeviceProfile& profile, const Scenario& scn) {
  return profile.distance_m / scn.light_speed_mps;
}

double AccessOverhead(const DeviceProfile& profile, const Scenario& scn) {
  return 3.0 * PropagationDelay(profile, scn) + scn.processing_delay_s;
}

double PNoCollision(const Scenario& scn) {
  return PNoCollision(ContentionConfig{std::max(1, scn.device_count()),
                                       scn.preamble_count});
}

PacketStats ComputePacketStats(const Scenario& scn, const BlocklengthPlan& plan,
                               int k) {
  PacketStats st;
  st.p_one = PNoCollision(scn);
  const int len = static_cast<int>(plan.devices[k].ttis_s.size());
  st.p_err.resize(len);
  st.p_suc.resize(len);
  st.expected_retx.resize(len);
  for (int m = 1; m <= len; ++m) {
    const double n = BlocklengthOf(scn, plan, k, m);
    const double pe = ExpectedErrorProbability(n, scn.bits_per_packet,
                                               scn.constants);
    const double ps = PSuccess(st.p_one, pe);
    st.p_err[m - 1] = pe;
    st.p_suc[m - 1] = ps;
    if (ps > 0.0) {
      st.expected_retx[m - 1] = ExpectedRetransmissions(ps);
    } else {
      st.expected_retx[m - 1] = kInf;
      st.starved = true;
    }
  }
  return st;
}

DeviceDelay ComputeDeviceDelay(const Scenario& scn, const BlocklengthPlan& plan,
                               int k, std::span<const double> steady) {
  DeviceDelay out;
  out.stats = ComputePacketStats(scn, plan, k);
  if (out.stats.starved) {
    throw InfeasibleLink("device " + std::to_string(k) +
                         " has a packet with zero success probability");
  }
  const auto& ttis = plan.devices[k].ttis_s;
  const int len = static_cast<int>(ttis.size());
  if (static_cast<int>(steady.size()) != len + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "stationary vector length does not match queue length");
  }
  out.max_len = len;
  out.steady.assign(steady.begin(), steady.end());
  out.per_packet_queuing.assign(len, 0.0);
  const double overhead = AccessOverhead(scn.devices[k], scn);
  const auto& retx = out.stats.expected_retx;

  // Packet m waits for packets 1..m-1; there is no packet at index 0.
  double ahead = 0.0;
  for (int m = 1; m <= len; ++m) {
    out.per_packet_queuing[m - 1] = ahead;
    ahead += (ttis[m - 1] + overhead) * retx[m - 1];
  }
  for (int m = 1; m <= len; ++m) {
    out.queuing += steady[m] * out.per_packet_queuing[m - 1];
    out.transmission += ttis[m - 1] * retx[m - 1];
    out.proc_prop += overhead * retx[m - 1];
  }
  out.total = out.queuing + out.transmission + out.proc_prop;
  return out;
}

DeviceDelay ComputeDeviceDelay(const Scenario& scn, const BlocklengthPlan& plan,
                               int k) {
  const PacketStats st = ComputePacketStats(scn, plan, k);
  if (st.starved) {
    throw InfeasibleLink("device " + std::to_string(k) +
                         " has a packet with zero success probability");
  }
  const QueueChain chain = BuildChain(scn.arrival(k), st.p_suc);
  const std::vector<double> pi = SteadyStateClosedForm(chain);
  return ComputeDeviceDelay(scn, plan, k, pi);
}

double AverageOtaDelay(const Scenario& scn, const BlocklengthPlan& plan) {
  ValidatePlan(scn, plan);
  if (scn.devices.empty()) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < scn.device_count(); ++k) {
    if (plan.devices[k].ttis_s.empty()) continue;
    sum += ComputeDeviceDelay(scn, plan, k).total;
  }
  return sum / scn.device_count();
}

bool DevicePeriodOk(const Scenario& scn, const DevicePlan& dp) {
  double busy = 0.0;
  for (double t : dp.ttis_s) busy += t;
  return busy <= scn.period_s + kPeriodSlackS;
}

bool DeviceRateOk(const Scenario& scn, const DevicePlan& dp, int k) {
  const int len = static_cast<int>(dp.ttis_s.size());
  const double snr = scn.constants.mean_snr();
  double capacity_bits = 0.0;
  for (int m = 0; m < len; ++m) {
    const double n = dp.ttis_s[m] * dp.subchannels * scn.subchannel_bandwidth_hz;
    const double rate = AchievableRate(snr, n, scn.eps_target);
    capacity_bits += std::max(0.0, rate) * n;
  }
  double offered = 0.0;
  const ArrivalModel arr = scn.arrival(k);
  for (int a = 0; a <= len; ++a) offered += a * ArrivalPmf(arr, a);
  return capacity_bits >= scn.bits_per_packet * offered;
}

Feasibility CheckFeasibility(const Scenario& scn, const BlocklengthPlan& plan,
                             bool strict_subchannels) {
  ValidatePlan(scn, plan);
  Feasibility f;
  const int num = scn.device_count();
  f.device_period_ok.assign(num, true);
  f.device_rate_ok.assign(num, true);
  for (int k = 0; k < num; ++k) {
    const DevicePlan& dp = plan.devices[k];
    const int len = static_cast<int>(dp.ttis_s.size());
    if (len == 0) continue;
    f.subchannels_used += dp.subchannels;

    f.device_period_ok[k] = DevicePeriodOk(scn, dp);
    f.device_rate_ok[k] = DeviceRateOk(scn, dp, k);

    f.period_ok = f.period_ok && f.device_period_ok[k];
    f.rate_ok = f.rate_ok && f.device_rate_ok[k];
  }
  f.subchannels_ok = strict_subchannels
                         ? f.subchannels_used == scn.subchannel_count
                         : f.subchannels_used <= scn.subchannel_count;
  return f;
}

double PlanObjective(const Scenario& scn, const BlocklengthPlan& plan) {
  if (!CheckFeasibility(scn, plan).ok()) return kInf;
  try {
    return AverageOtaDelay(scn, plan);
  } catch (const InfeasibleLink&) {
    return kInf;
  }
}

std::vector<QueueClass> PartitionByQueueLength(const Scenario& scn) {
  std::map<int, std::vector<int>> by_len;
  for (int k = 0; k < scn.device_count(); ++k) {
    const int len = scn.max_queue_length(k);
    if (len > 0) by_len[len].push_back(k);
  }
  std::vector<QueueClass> out;
  out.reserve(by_len.size());
  for (auto& [len, members] : by_len) out.push_back({len, std::move(members)});
  return out;
}

DelayReport Analyze(const Scenario& scn, const BlocklengthPlan& plan) {
  ValidatePlan(scn, plan);
  DelayReport rep;
  const int num = scn.device_count();
  rep.devices.resize(num);
  rep.starved.assign(num, false);
  rep.feasibility = CheckFeasibility(scn, plan);
  double sum = 0.0;
  for (int k = 0; k < num; ++k) {
    if (plan.devices[k].ttis_s.empty()) {
      rep.devices[k].steady = {1.0};
      continue;
    }
    const PacketStats st = ComputePacketStats(scn, plan, k);
    if (st.starved) {
      rep.starved[k] = true;
      rep.devices[k].max_len = static_cast<int>(st.p_suc.size());
      rep.devices[k].stats = st;
      rep.devices[k].queuing = rep.devices[k].transmission =
          rep.devices[k].proc_prop = rep.devices[k].total = kInf;
      sum = kInf;
      continue;
    }
    rep.devices[k] = ComputeDeviceDelay(scn, plan, k);
    sum += rep.devices[k].total;
  }
  rep.average = num > 0 ? sum / num : 0.0;

  rep.classes = PartitionByQueueLength(scn);
  for (const QueueClass& qc : rep.classes) {
    int cost = 0;
    for (int k : qc.members) {
      if (!rep.feasibility.device_period_ok[k] ||
          !rep.feasibility.device_rate_ok[k] || rep.starved[k]) {
        cost = 1;
      }
    }
    rep.transmission_cost.push_back(cost);
  }
  rep.subchannel_cost = rep.feasibility.subchannels_ok ? 0 : 1;
  return rep;
}

}  // namespace adablock
