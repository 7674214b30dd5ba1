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


#include <doctest.h>

#include <limits>
#include <string>

#include "adablock/errors.hpp"
#include "adablock/io.hpp"

using namespace adablock;

namespace {

// Code and message of the error thrown while parsing `text`.
std::pair<ErrorCode, std::string> Failure(const std::string& text) {
  try {
    ParseScenario(text);
  } catch (const Error& e) {
    return {e.code(), e.what()};
  }
  FAIL("expected an error for: " << text);
  return {};
}

}  // namespace

TEST_CASE("an empty object gives the defaults") {
  const ScenarioSpec spec = ParseScenario("{}");
  const Scenario& s = spec.scenario;
  CHECK(s.device_count() == 0);
  CHECK(s.period_s == 5e-3);
  CHECK(s.preamble_count == 500);
  CHECK(s.subchannel_count == 2000);
  CHECK(s.bits_per_packet == 256);
  CHECK_FALSE(spec.generator.has_value());
}

TEST_CASE("units convert to SI") {
  const Scenario s = ParseScenario(R"({
    "period": "2 ms", "subchannel_bandwidth": "0.2 MHz",
    "processing_delay": "15 us", "cell_radius": "1.5 km",
    "noise_power": "-90 dBm", "power_threshold": "1 mW",
    "devices": [{"rate": "0.5 /ms", "distance": "120 m"},
                {"rate": 40, "distance": 80}]})").scenario;
  CHECK(s.period_s == doctest::Approx(2e-3));
  CHECK(s.subchannel_bandwidth_hz == doctest::Approx(2e5));
  CHECK(s.processing_delay_s == doctest::Approx(15e-6));
  CHECK(s.cell_radius_m == doctest::Approx(1500));
  CHECK(s.constants.noise_power_w == doctest::Approx(1e-12));
  CHECK(s.constants.power_threshold_w == doctest::Approx(1e-3));
  CHECK(s.devices[0].rate_per_s == doctest::Approx(500));
  CHECK(s.devices[1].distance_m == 80);
  // 500 /s over 2 ms is a Poisson load of 1.
  CHECK(s.max_queue_length(0) >= 1);

  const Scenario t = ParseScenario(
      R"({"period": "5 ms", "devices": [{"rate": "0.5 /ms", "distance": 10}]})")
                         .scenario;
  CHECK(t.max_queue_length(0) == 3);
}

TEST_CASE("schema errors name the field") {
  auto [c1, m1] = Failure(R"({"perod": "5 ms"})");
  CHECK(c1 == ErrorCode::kSchema);
  CHECK(m1.find("perod") != std::string::npos);

  auto [c2, m2] = Failure(R"({"period": "5 parsecs"})");
  CHECK(c2 == ErrorCode::kSchema);
  CHECK(m2.find("period") != std::string::npos);

  auto [c3, m3] = Failure(R"({"devices": [{"rate": 3}]})");
  CHECK(c3 == ErrorCode::kSchema);
  CHECK(m3.find("devices[0].distance") != std::string::npos);

  auto [c4, m4] = Failure(R"({"devices": [], "device_generator": {"count": 2}})");
  CHECK(c4 == ErrorCode::kSchema);
}

TEST_CASE("syntax errors report line and column") {
  auto [code, msg] = Failure("{\n  \"period\": \"5 ms\",\n  oops\n}");
  CHECK(code == ErrorCode::kParse);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("device generator") {
  const char* text = R"({"device_generator": {"count": 30, "seed": 7,
                         "rate_min": "0 /s", "rate_max": "1 /ms"}})";
  const ScenarioSpec spec = ParseScenario(text);
  REQUIRE(spec.generator.has_value());
  CHECK(spec.scenario.device_count() == 30);
  for (const DeviceProfile& d : spec.scenario.devices) {
    CHECK(d.rate_per_s >= 0);
    CHECK(d.rate_per_s <= 1000);
    CHECK(d.distance_m <= spec.scenario.cell_radius_m);
  }
  // Smaller populations are prefixes of larger ones.
  const Scenario small = WithDeviceCount(spec, 10);
  const Scenario big = WithDeviceCount(spec, 50);
  REQUIRE(small.device_count() == 10);
  REQUIRE(big.device_count() == 50);
  for (int k = 0; k < 10; ++k) {
    CHECK(small.devices[k].rate_per_s == spec.scenario.devices[k].rate_per_s);
    CHECK(big.devices[k].distance_m == spec.scenario.devices[k].distance_m);
  }
  CHECK(ParseScenario(text).scenario.devices[3].rate_per_s ==
        spec.scenario.devices[3].rate_per_s);
}

TEST_CASE("scenario JSON round trip and hash") {
  const Scenario s = ParseScenario(R"({"period": "2.5 ms", "bits_per_packet": 400,
      "devices": [{"rate": 536, "distance": 390}, {"rate": 32, "distance": 110}]})")
                         .scenario;
  const Scenario back = ParseScenario(ScenarioToJson(s)).scenario;
  CHECK(ScenarioToJson(back) == ScenarioToJson(s));
  CHECK(ScenarioHash(back) == ScenarioHash(s));
  CHECK(HashHex(ScenarioHash(s)).size() == 16);

  Scenario other = s;
  other.devices[1].rate_per_s += 1;
  CHECK(ScenarioHash(other) != ScenarioHash(s));
}

TEST_CASE("plan JSON round trip") {
  BlocklengthPlan p;
  p.devices = {{{1e-3, 0.25e-3}, 4}, {{}, 0}, {{0.1}, 16}};
  const BlocklengthPlan q = ParsePlan(PlanToJson(p, 0xabcdefULL));
  REQUIRE(q.devices.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(q.devices[i].subchannels == p.devices[i].subchannels);
    CHECK(q.devices[i].ttis_s == p.devices[i].ttis_s);
  }
  CHECK_THROWS_AS(ParsePlan(R"({"devices": [{"tti": [1]}]})"), Error);
  CHECK_THROWS_AS(ParsePlan(R"({"devices": [{"tti_s": "fast"}]})"), Error);
  CHECK_THROWS_AS(LoadPlan("/nonexistent/plan.json"), Error);
}

TEST_CASE("number formatting is exact") {
  CHECK(FormatDouble(0.1) == "0.1");
  CHECK(std::stod(FormatDouble(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(FormatDouble(std::numeric_limits<double>::infinity()) == "inf");
}
