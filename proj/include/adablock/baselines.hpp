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

// Reference solvers for the average-delay minimization: fixed-TTI plans
// (LTE 1 ms, NR 0.5 ms), uniform random search, exhaustive enumeration and
// hill climbing over a discrete plan space.

#ifndef ADABLOCK_BASELINES_HPP_
#define ADABLOCK_BASELINES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "adablock/delaymodel.hpp"

namespace adablock {

inline constexpr double kLteTtiS = 1e-3;
inline constexpr double kNrTtiS = 0.5e-3;

// Every packet of every device gets `tti_s`; subchannels are split evenly
// over active devices with the remainder going to the lowest indices.
// Throws Error(kInfeasible) when there are more active devices than
// subchannels.
BlocklengthPlan FixedTtiPlan(const Scenario& scn, double tti_s);

// A discrete plan space. Devices in one cohort share their per-position TTIs
// and their per-device subchannel count. An encoding lists, cohort by
// cohort, one TTI level index per queue position followed by one
// subchannel option index.
struct SearchSpace {
  std::vector<double> tti_levels;  // strictly increasing, all <= T_max
  std::vector<int> subch_options;  // per-device counts, increasing
  std::vector<QueueClass> cohorts;

  size_t encoding_length() const;
  // Number of distinct encodings, saturating at UINT64_MAX.
  uint64_t size() const;
};

// TTI levels {T_max/L, 2 T_max/L, ..., T_max}; subchannel options are the
// ladder 1, 2, 4, ... up to M_subc plus the even share M_subc / active.
// `grouped` uses one cohort per queue-length class (the M-DQN grouping);
// otherwise every active device is its own cohort.
SearchSpace MakeSearchSpace(const Scenario& scn, int levels,
                            bool grouped = true);

BlocklengthPlan Decode(const Scenario& scn, const SearchSpace& space,
                       std::span<const int> encoding);

struct SearchResult {
  bool found = false;
  BlocklengthPlan plan;
  std::vector<int> encoding;
  double objective = 0;  // PlanObjective of `plan`
  uint64_t evaluations = 0;
};

inline constexpr uint64_t kDefaultEnumerationCap = 10'000'000;

// Best feasible plan among `samples` uniform draws that respect the
// subchannel budget. `found` is false if no draw was feasible.
SearchResult RandomSearch(const Scenario& scn, const SearchSpace& space,
                          int samples, uint64_t seed);

// Global optimum over the space; ties go to the lexicographically smallest
// encoding. Throws Error(kCapExceeded) if the space exceeds `cap`.
SearchResult ExhaustiveSearch(const Scenario& scn, const SearchSpace& space,
                              uint64_t cap = kDefaultEnumerationCap);

// Same optimum and tie-break as ExhaustiveSearch, but the cap applies to
// the summed per-cohort table sizes instead of the joint space, so it
// scales to many cohorts of short queues.
uint64_t CohortTableSize(const SearchSpace& space);
SearchResult OracleSearch(const Scenario& scn, const SearchSpace& space,
                          uint64_t cap = kDefaultEnumerationCap);

// Steepest-descent hill climbing from `init` over single-coordinate moves
// (one TTI level or one subchannel option up or down). Never returns a plan
// worse than `init`.
SearchResult LocalSearch(const Scenario& scn, const SearchSpace& space,
                         const BlocklengthPlan& init, int iters, uint64_t seed);

}  // namespace adablock

#endif  // ADABLOCK_BASELINES_HPP_
