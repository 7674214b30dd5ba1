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

#include <cmath>
#include <limits>

#include "adablock/baselines.hpp"
#include "adablock/errors.hpp"

using namespace adablock;

namespace {

// Every encoding of a small space, scored with the plain objective.
SearchResult BruteForce(const Scenario& scn, const SearchSpace& space) {
  std::vector<int> radix;
  for (const QueueClass& c : space.cohorts) {
    for (int m = 0; m < c.max_len; ++m) radix.push_back(space.tti_levels.size());
    radix.push_back(space.subch_options.size());
  }
  std::vector<int> enc(radix.size(), 0);
  SearchResult best;
  best.objective = std::numeric_limits<double>::infinity();
  while (true) {
    const BlocklengthPlan p = Decode(scn, space, enc);
    const double obj = PlanObjective(scn, p);
    if (obj < best.objective) {
      best.objective = obj;
      best.encoding = enc;
      best.found = true;
    }
    int i = static_cast<int>(enc.size()) - 1;
    while (i >= 0 && ++enc[i] == radix[i]) enc[i--] = 0;
    if (i < 0) break;
  }
  return best;
}

Scenario Toy() {
  Scenario s;
  s.period_s = 2.5e-3;
  s.subchannel_count = 20;
  s.preamble_count = 10;
  s.bits_per_packet = 400;
  const double loads[] = {1.34, 1.93, 0.08, 0.12, 0.45, 0.45, 1.14};
  const double dist[] = {390, 60, 110, 190, 210, 210, 130};
  for (int k = 0; k < 7; ++k) s.devices.push_back({loads[k] / s.period_s, dist[k]});
  return s;
}

}  // namespace

TEST_CASE("fixed-TTI plans") {
  Scenario s;
  s.subchannel_count = 5;
  s.devices = {{300, 100}, {0, 50}, {100, 200}};
  const BlocklengthPlan p = FixedTtiPlan(s, kLteTtiS);
  CHECK(p.devices[0].subchannels == 3);
  CHECK(p.devices[1].subchannels == 0);
  CHECK(p.devices[1].ttis_s.empty());
  CHECK(p.devices[2].subchannels == 2);
  CHECK(p.devices[0].ttis_s == std::vector<double>{1e-3, 1e-3});
  CHECK(FixedTtiPlan(s, kNrTtiS).devices[2].ttis_s == std::vector<double>{0.5e-3});
  s.subchannel_count = 1;
  CHECK_THROWS_AS(FixedTtiPlan(s, 1e-3), Error);
}

TEST_CASE("search space layout") {
  const Scenario s = Toy();
  const SearchSpace sp = MakeSearchSpace(s, 5, true);
  CHECK(sp.tti_levels.size() == 5);
  CHECK(sp.tti_levels.back() == doctest::Approx(s.period_s));
  CHECK(sp.subch_options == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(sp.cohorts.size() == 2);
  CHECK(sp.encoding_length() == 2 + 3);
  CHECK(sp.size() == 5u * 5 * 5 * 5 * 5);
  const SearchSpace flat = MakeSearchSpace(s, 5, false);
  CHECK(flat.cohorts.size() == 7);
}

TEST_CASE("single device, twelve plans") {
  Scenario s;
  s.subchannel_count = 4;
  s.devices = {{100, 200}};
  const SearchSpace sp = MakeSearchSpace(s, 4, true);
  REQUIRE(sp.size() == 12);
  const SearchResult ex = ExhaustiveSearch(s, sp);
  const SearchResult bf = BruteForce(s, sp);
  CHECK(ex.found);
  CHECK(ex.objective == doctest::Approx(bf.objective).epsilon(1e-12));
  CHECK(ex.encoding == bf.encoding);
}

TEST_CASE("exhaustive search equals brute force on the toy instance") {
  const Scenario s = Toy();
  const SearchSpace sp = MakeSearchSpace(s, 5, true);
  const SearchResult ex = ExhaustiveSearch(s, sp);
  const SearchResult bf = BruteForce(s, sp);
  REQUIRE(ex.found);
  CHECK(ex.objective == doctest::Approx(bf.objective).epsilon(1e-12));
  CHECK(ex.encoding == bf.encoding);
  const SearchResult orc = OracleSearch(s, sp);
  CHECK(orc.encoding == ex.encoding);
  CHECK(orc.objective == ex.objective);
  CHECK(ex.objective < PlanObjective(s, FixedTtiPlan(s, kNrTtiS)));
}

TEST_CASE("symmetric devices get symmetric plans") {
  Scenario s;
  s.subchannel_count = 8;
  s.devices = {{300, 150}, {300, 150}};
  const SearchResult r = ExhaustiveSearch(s, MakeSearchSpace(s, 4, false));
  REQUIRE(r.found);
  CHECK(r.plan.devices[0].ttis_s == r.plan.devices[1].ttis_s);
  CHECK(r.plan.devices[0].subchannels == r.plan.devices[1].subchannels);
}

TEST_CASE("enumeration cap") {
  Scenario s = Toy();
  const SearchSpace sp = MakeSearchSpace(s, 5, true);
  try {
    ExhaustiveSearch(s, sp, 100);
    FAIL("expected a cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCapExceeded);
  }
  CHECK(CohortTableSize(sp) == 5u * 5 + 5u * 5 * 5);
  CHECK_THROWS_AS(OracleSearch(s, sp, 100), Error);
}

TEST_CASE("random search") {
  const Scenario s = Toy();
  const SearchSpace sp = MakeSearchSpace(s, 5, true);
  const SearchResult ex = ExhaustiveSearch(s, sp);
  const SearchResult a = RandomSearch(s, sp, 200, 3);
  const SearchResult b = RandomSearch(s, sp, 200, 3);
  CHECK(a.objective == b.objective);
  CHECK(a.encoding == b.encoding);
  CHECK(a.objective >= ex.objective);
  CHECK(a.objective == doctest::Approx(PlanObjective(s, a.plan)));

  Scenario one;
  one.subchannel_count = 1;
  one.devices = {{100, 100}};
  const SearchSpace tiny = MakeSearchSpace(one, 1, true);
  REQUIRE(tiny.size() == 1);
  const SearchResult r = RandomSearch(one, tiny, 5, 1);
  CHECK(r.found);
  CHECK(r.encoding == std::vector<int>{0, 0});
}

TEST_CASE("local search") {
  const Scenario s = Toy();
  const SearchSpace sp = MakeSearchSpace(s, 5, true);
  const BlocklengthPlan lte = FixedTtiPlan(s, kLteTtiS);
  const double lte_obj = PlanObjective(s, lte);
  const SearchResult none = LocalSearch(s, sp, lte, 0, 1);
  CHECK(none.objective == lte_obj);
  const SearchResult climbed = LocalSearch(s, sp, lte, 1000, 1);
  CHECK(climbed.objective <= lte_obj);
  const SearchResult ex = ExhaustiveSearch(s, sp);
  const SearchResult stay = LocalSearch(s, sp, ex.plan, 1000, 1);
  CHECK(stay.objective == doctest::Approx(ex.objective).epsilon(1e-15));
}
