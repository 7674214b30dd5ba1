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


// Scenario and plan files.
//
// Scenario JSON: every field is optional and takes the documented default.
// Quantities are either bare numbers in the field's base unit (seconds,
// hertz, metres, packets per second; dBm for powers) or strings with a
// unit, e.g. "5 ms", "-80 dBm", "100 kHz", "0.5 /ms". Devices are given
// either explicitly or through a seeded generator.

#ifndef ADABLOCK_IO_HPP_
#define ADABLOCK_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "adablock/delaymodel.hpp"

namespace adablock {

// Device k draws its rate uniformly from [rate_min, rate_max) and its
// position uniformly over the cell disk, from its own stream
// "devices/<k>", so the first K devices do not depend on `count`.
struct DeviceGenerator {
  int count = 0;
  uint64_t seed = 1;
  double rate_min_per_s = 0;
  double rate_max_per_s = 1000;  // 1 per ms
};

std::vector<DeviceProfile> GenerateDevices(const DeviceGenerator& gen,
                                           int count, double cell_radius_m);

struct ScenarioSpec {
  Scenario scenario;
  std::optional<DeviceGenerator> generator;
};

// Throws Error(kParse) with line and column, or Error(kSchema) naming the
// offending field.
ScenarioSpec ParseScenario(std::string_view text);
ScenarioSpec LoadScenario(const std::string& path);

// Resolved form: every field present, explicit devices, SI values written
// with unit strings at full precision so that reloading is exact.
std::string ScenarioToJson(const Scenario& scn);

// FNV-1a 64 of the resolved form.
uint64_t ScenarioHash(const Scenario& scn);
std::string HashHex(uint64_t h);

// Scenario with the first `count` devices (generated when a generator is
// present, otherwise a prefix of the explicit list).
Scenario WithDeviceCount(const ScenarioSpec& spec, int count);

// Plan JSON: {"scenario_hash": "...", "devices": [{"subchannels": 4,
// "tti_s": [0.0005, ...]}, ...]}. TTIs are seconds.
BlocklengthPlan ParsePlan(std::string_view text);
BlocklengthPlan LoadPlan(const std::string& path);
std::string PlanToJson(const BlocklengthPlan& plan, uint64_t scenario_hash);

// Double formatting shared by every CSV and JSON writer: shortest
// round-trip digits, "inf"/"nan" spelled out.
std::string FormatDouble(double v);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace adablock

#endif  // ADABLOCK_IO_HPP_
