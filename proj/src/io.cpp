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


#include "adablock/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adablock/errors.hpp"
#include "adablock/linkmodel.hpp"
#include "adablock/rng.hpp"
#include "json.hpp"

namespace adablock {
namespace {

using nlohmann::json;

enum class Dim { kPlain, kTime, kFrequency, kPower, kDistance, kRate, kSpeed };

[[noreturn]] void SchemaError(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kSchema, field + ": " + what);
}

// Scale to SI for every accepted unit; powers are handled separately.
const std::map<std::string, double>& UnitTable(Dim d) {
  static const std::map<Dim, std::map<std::string, double>> tables = {
      {Dim::kPlain, {{"", 1.0}}},
      {Dim::kTime, {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6},
                    {"\xC2\xB5s", 1e-6}, {"ns", 1e-9}}},
      {Dim::kFrequency,
       {{"", 1.0}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
      {Dim::kDistance, {{"", 1.0}, {"m", 1.0}, {"km", 1e3}}},
      {Dim::kRate,
       {{"", 1.0}, {"/s", 1.0}, {"/ms", 1e3}, {"pkt/s", 1.0}, {"pkt/ms", 1e3}}},
      {Dim::kSpeed, {{"", 1.0}, {"m/s", 1.0}}},
  };
  return tables.at(d);
}

double ParseQuantity(const json& v, Dim dim, const std::string& field) {
  double number = 0.0;
  std::string unit;
  if (v.is_number()) {
    number = v.get<double>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, number);
    if (ec != std::errc()) SchemaError(field, "malformed quantity '" + s + "'");
    while (ptr < last && *ptr == ' ') ++ptr;
    unit.assign(ptr, last);
    while (!unit.empty() && unit.back() == ' ') unit.pop_back();
  } else {
    SchemaError(field, "expected a number or a quantity string");
  }
  if (!std::isfinite(number)) SchemaError(field, "value must be finite");
  if (dim == Dim::kPower) {
    if (unit.empty() || unit == "dBm") return DbmToWatts(number);
    if (unit == "dBW") return DbmToWatts(number + 30.0);
    if (unit == "W") return number;
    if (unit == "mW") return number * 1e-3;
    SchemaError(field, "unknown power unit '" + unit + "'");
  }
  const auto& table = UnitTable(dim);
  auto it = table.find(unit);
  if (it == table.end()) SchemaError(field, "unknown unit '" + unit + "'");
  return number * it->second;
}

int64_t ParseInt(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<int64_t>(d);
  }
  SchemaError(field, "expected an integer");
}

int ParseCount(const json& v, const std::string& field) {
  const int64_t n = ParseInt(v, field);
  if (n < 0 || n > 100'000'000) SchemaError(field, "count out of range");
  return static_cast<int>(n);
}

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      SchemaError(where.empty() ? it.key() : where + "." + it.key(),
                  "unknown field");
    }
  }
}

std::string WithUnit(double v, const char* unit) {
  return FormatDouble(v) + " " + unit;
}

json Parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    size_t line = 1;
    size_t col = 1;
    const size_t stop = std::min<size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto colon = msg.find("; ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw Error(ErrorCode::kParse, std::string(what) + " line " +
                                       std::to_string(line) + ", column " +
                                       std::to_string(col) + ": " + msg);
  }
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<DeviceProfile> GenerateDevices(const DeviceGenerator& gen,
                                           int count, double cell_radius_m) {
  std::vector<DeviceProfile> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rng rng(gen.seed, "devices/" + std::to_string(k));
    DeviceProfile d;
    d.rate_per_s = rng.Uniform(gen.rate_min_per_s, gen.rate_max_per_s);
    d.distance_m = cell_radius_m * std::sqrt(1.0 - rng.Uniform());
    out.push_back(d);
  }
  return out;
}

ScenarioSpec ParseScenario(std::string_view text) {
  const json doc = Parse(text, "scenario");
  if (!doc.is_object()) SchemaError("scenario", "top level must be an object");
  CheckKeys(doc,
            {"power_threshold", "noise_power", "pathloss_exponent",
             "reference_gain", "period", "preamble_count", "subchannel_count",
             "subchannel_bandwidth", "bits_per_packet", "processing_delay",
             "eps_target", "light_speed", "cell_radius", "devices",
             "device_generator"},
            "");
  ScenarioSpec spec;
  Scenario& s = spec.scenario;
  RadioConstants& rc = s.constants;
  rc.power_threshold_w = DbmToWatts(-80.0);
  rc.noise_power_w = DbmToWatts(-90.0);

  auto quantity = [&](const char* key, Dim dim, double* dst) {
    if (doc.contains(key)) *dst = ParseQuantity(doc[key], dim, key);
  };
  quantity("power_threshold", Dim::kPower, &rc.power_threshold_w);
  quantity("noise_power", Dim::kPower, &rc.noise_power_w);
  quantity("pathloss_exponent", Dim::kPlain, &rc.pathloss_exponent);
  quantity("reference_gain", Dim::kPlain, &rc.reference_gain);
  quantity("period", Dim::kTime, &s.period_s);
  if (doc.contains("preamble_count")) {
    s.preamble_count = ParseCount(doc["preamble_count"], "preamble_count");
  }
  if (doc.contains("subchannel_count")) {
    s.subchannel_count = ParseCount(doc["subchannel_count"], "subchannel_count");
  }
  quantity("subchannel_bandwidth", Dim::kFrequency, &s.subchannel_bandwidth_hz);
  quantity("bits_per_packet", Dim::kPlain, &s.bits_per_packet);
  quantity("processing_delay", Dim::kTime, &s.processing_delay_s);
  quantity("eps_target", Dim::kPlain, &s.eps_target);
  quantity("light_speed", Dim::kSpeed, &s.light_speed_mps);
  quantity("cell_radius", Dim::kDistance, &s.cell_radius_m);

  if (doc.contains("devices") && doc.contains("device_generator")) {
    SchemaError("devices", "give either devices or device_generator, not both");
  }
  if (doc.contains("devices")) {
    const json& arr = doc["devices"];
    if (!arr.is_array()) SchemaError("devices", "expected an array");
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "devices[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) SchemaError(where, "expected an object");
      CheckKeys(arr[i], {"rate", "distance"}, where);
      if (!arr[i].contains("rate")) SchemaError(where + ".rate", "missing");
      if (!arr[i].contains("distance")) {
        SchemaError(where + ".distance", "missing");
      }
      DeviceProfile d;
      d.rate_per_s = ParseQuantity(arr[i]["rate"], Dim::kRate, where + ".rate");
      d.distance_m =
          ParseQuantity(arr[i]["distance"], Dim::kDistance, where + ".distance");
      s.devices.push_back(d);
    }
  }
  if (doc.contains("device_generator")) {
    const json& g = doc["device_generator"];
    const std::string where = "device_generator";
    if (!g.is_object()) SchemaError(where, "expected an object");
    CheckKeys(g, {"count", "seed", "rate_min", "rate_max"}, where);
    DeviceGenerator gen;
    if (!g.contains("count")) SchemaError(where + ".count", "missing");
    gen.count = ParseCount(g["count"], where + ".count");
    if (g.contains("seed")) {
      const int64_t seed = ParseInt(g["seed"], where + ".seed");
      if (seed < 0) SchemaError(where + ".seed", "must be >= 0");
      gen.seed = static_cast<uint64_t>(seed);
    }
    if (g.contains("rate_min")) {
      gen.rate_min_per_s = ParseQuantity(g["rate_min"], Dim::kRate, where + ".rate_min");
    }
    if (g.contains("rate_max")) {
      gen.rate_max_per_s = ParseQuantity(g["rate_max"], Dim::kRate, where + ".rate_max");
    }
    if (!(gen.rate_min_per_s >= 0.0 && gen.rate_max_per_s >= gen.rate_min_per_s)) {
      SchemaError(where, "need 0 <= rate_min <= rate_max");
    }
    spec.generator = gen;
  }
  try {
    s.Validate();
  } catch (const DomainError& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
  if (spec.generator) {
    s.devices = GenerateDevices(*spec.generator, spec.generator->count,
                                s.cell_radius_m);
    s.Validate();
  }
  return spec;
}

ScenarioSpec LoadScenario(const std::string& path) {
  return ParseScenario(ReadFile(path));
}

std::string ScenarioToJson(const Scenario& scn) {
  json doc;
  const RadioConstants& rc = scn.constants;
  doc["power_threshold"] = WithUnit(rc.power_threshold_w, "W");
  doc["noise_power"] = WithUnit(rc.noise_power_w, "W");
  doc["pathloss_exponent"] = rc.pathloss_exponent;
  doc["reference_gain"] = rc.reference_gain;
  doc["period"] = WithUnit(scn.period_s, "s");
  doc["preamble_count"] = scn.preamble_count;
  doc["subchannel_count"] = scn.subchannel_count;
  doc["subchannel_bandwidth"] = WithUnit(scn.subchannel_bandwidth_hz, "Hz");
  doc["bits_per_packet"] = scn.bits_per_packet;
  doc["processing_delay"] = WithUnit(scn.processing_delay_s, "s");
  doc["eps_target"] = scn.eps_target;
  doc["light_speed"] = WithUnit(scn.light_speed_mps, "m/s");
  doc["cell_radius"] = WithUnit(scn.cell_radius_m, "m");
  json devs = json::array();
  for (const DeviceProfile& d : scn.devices) {
    devs.push_back({{"rate", WithUnit(d.rate_per_s, "/s")},
                    {"distance", WithUnit(d.distance_m, "m")}});
  }
  doc["devices"] = std::move(devs);
  return doc.dump(2) + "\n";
}

uint64_t ScenarioHash(const Scenario& scn) {
  return Fnv1a64(ScenarioToJson(scn));
}

std::string HashHex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario WithDeviceCount(const ScenarioSpec& spec, int count) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "negative device count");
  Scenario s = spec.scenario;
  if (spec.generator) {
    s.devices = GenerateDevices(*spec.generator, count, s.cell_radius_m);
  } else {
    if (count > s.device_count()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scenario lists " + std::to_string(s.device_count()) +
                      " devices; add a device_generator to go up to " +
                      std::to_string(count));
    }
    s.devices.resize(count);
  }
  return s;
}

BlocklengthPlan ParsePlan(std::string_view text) {
  const json doc = Parse(text, "plan");
  if (!doc.is_object()) SchemaError("plan", "top level must be an object");
  CheckKeys(doc, {"scenario_hash", "devices"}, "");
  if (!doc.contains("devices") || !doc["devices"].is_array()) {
    SchemaError("devices", "expected an array");
  }
  BlocklengthPlan plan;
  const json& arr = doc["devices"];
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "devices[" + std::to_string(i) + "]";
    const json& d = arr[i];
    if (!d.is_object()) SchemaError(where, "expected an object");
    CheckKeys(d, {"subchannels", "tti_s"}, where);
    DevicePlan dp;
    if (d.contains("subchannels")) {
      dp.subchannels = ParseCount(d["subchannels"], where + ".subchannels");
    }
    if (d.contains("tti_s")) {
      if (!d["tti_s"].is_array()) SchemaError(where + ".tti_s", "expected an array");
      for (const json& t : d["tti_s"]) {
        if (!t.is_number()) SchemaError(where + ".tti_s", "expected numbers");
        dp.ttis_s.push_back(t.get<double>());
      }
    }
    plan.devices.push_back(std::move(dp));
  }
  return plan;
}

BlocklengthPlan LoadPlan(const std::string& path) {
  return ParsePlan(ReadFile(path));
}

std::string PlanToJson(const BlocklengthPlan& plan, uint64_t scenario_hash) {
  json doc;
  doc["scenario_hash"] = HashHex(scenario_hash);
  json devs = json::array();
  for (const DevicePlan& dp : plan.devices) {
    devs.push_back({{"subchannels", dp.subchannels}, {"tti_s", dp.ttis_s}});
  }
  doc["devices"] = std::move(devs);
  return doc.dump(2) + "\n";
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace adablock
