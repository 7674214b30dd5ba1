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

#include "adablock/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adablock/errors.hpp"
#include "adablock/rng.hpp"

namespace adablock {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

uint64_t SatMul(uint64_t a, uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

void CheckEncoding(const SearchSpace& space, std::span<const int> enc) {
  if (enc.size() != space.encoding_length()) {
    throw Error(ErrorCode::kShape, "encoding has " + std::to_string(enc.size()) +
                                       " entries, space needs " +
                                       std::to_string(space.encoding_length()));
  }
  size_t pos = 0;
  for (const QueueClass& c : space.cohorts) {
    for (int m = 0; m < c.max_len; ++m, ++pos) {
      if (enc[pos] < 0 || enc[pos] >= static_cast<int>(space.tti_levels.size())) {
        throw Error(ErrorCode::kInvalidArgument, "TTI level index out of range");
      }
    }
    if (enc[pos] < 0 ||
        enc[pos] >= static_cast<int>(space.subch_options.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subchannel option index out of range");
    }
    ++pos;
  }
}

int SubchannelsUsed(const SearchSpace& space, std::span<const int> enc) {
  int used = 0;
  size_t pos = 0;
  for (const QueueClass& c : space.cohorts) {
    pos += c.max_len;
    used += static_cast<int>(c.members.size()) * space.subch_options[enc[pos]];
    ++pos;
  }
  return used;
}

int Nearest(std::span<const double> grid, double x) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(grid.size()); ++i) {
    if (std::abs(grid[i] - x) < std::abs(grid[best] - x)) best = i;
  }
  return best;
}

// Encoding closest to `plan`, read from the first member of every cohort.
std::vector<int> Project(const SearchSpace& space, const BlocklengthPlan& plan) {
  std::vector<double> opts(space.subch_options.begin(),
                           space.subch_options.end());
  std::vector<int> enc;
  enc.reserve(space.encoding_length());
  for (const QueueClass& c : space.cohorts) {
    const DevicePlan& dp = plan.devices.at(c.members.front());
    for (int m = 0; m < c.max_len; ++m) {
      enc.push_back(Nearest(space.tti_levels, dp.ttis_s.at(m)));
    }
    enc.push_back(Nearest(opts, dp.subchannels));
  }
  return enc;
}

void Evaluate(const Scenario& scn, const SearchSpace& space,
              std::span<const int> enc, SearchResult* best) {
  ++best->evaluations;
  if (SubchannelsUsed(space, enc) > scn.subchannel_count) return;
  BlocklengthPlan plan = Decode(scn, space, enc);
  const double obj = PlanObjective(scn, plan);
  if (!std::isfinite(obj)) return;
  if (!best->found || obj < best->objective) {
    best->found = true;
    best->objective = obj;
    best->plan = std::move(plan);
    best->encoding.assign(enc.begin(), enc.end());
  }
}

// One feasible setting of a cohort, in lexicographic order of its
// sub-encoding.
struct CohortEntry {
  std::vector<int> enc;
  double delay_sum = 0;
  int subchannels = 0;
};

std::vector<CohortEntry> CohortTable(const Scenario& scn,
                                     const SearchSpace& space,
                                     const QueueClass& c) {
  const int levels = static_cast<int>(space.tti_levels.size());
  const int options = static_cast<int>(space.subch_options.size());
  BlocklengthPlan scratch;
  scratch.devices.resize(scn.devices.size());
  std::vector<int> digits(c.max_len + 1, 0);
  std::vector<CohortEntry> out;
  while (true) {
    DevicePlan dp;
    dp.subchannels = space.subch_options[digits.back()];
    for (int m = 0; m < c.max_len; ++m) {
      dp.ttis_s.push_back(space.tti_levels[digits[m]]);
    }
    bool ok = DevicePeriodOk(scn, dp) &&
              static_cast<int64_t>(c.members.size()) * dp.subchannels <=
                  scn.subchannel_count;
    double sum = 0.0;
    for (int k : c.members) {
      if (!ok) break;
      if (!DeviceRateOk(scn, dp, k)) {
        ok = false;
        break;
      }
      scratch.devices[k] = dp;
      try {
        sum += ComputeDeviceDelay(scn, scratch, k).total;
      } catch (const InfeasibleLink&) {
        ok = false;
      }
    }
    if (ok) {
      out.push_back({digits, sum,
                     static_cast<int>(c.members.size()) * dp.subchannels});
    }
    // Odometer, last digit fastest.
    int i = c.max_len;
    while (i >= 0) {
      const int radix = i == c.max_len ? options : levels;
      if (++digits[i] < radix) break;
      digits[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace

BlocklengthPlan FixedTtiPlan(const Scenario& scn, double tti_s) {
  if (!(tti_s > 0.0) || !std::isfinite(tti_s)) {
    throw DomainError("TTI must be positive");
  }
  std::vector<int> active;
  for (int k = 0; k < scn.device_count(); ++k) {
    if (scn.max_queue_length(k) > 0) active.push_back(k);
  }
  if (static_cast<int>(active.size()) > scn.subchannel_count) {
    throw Error(ErrorCode::kInfeasible,
                std::to_string(active.size()) + " active devices but only " +
                    std::to_string(scn.subchannel_count) + " subchannels");
  }
  BlocklengthPlan plan;
  plan.devices.resize(scn.devices.size());
  if (active.empty()) return plan;
  const int n = static_cast<int>(active.size());
  const int share = scn.subchannel_count / n;
  const int extra = scn.subchannel_count % n;
  for (int i = 0; i < n; ++i) {
    DevicePlan& dp = plan.devices[active[i]];
    dp.ttis_s.assign(scn.max_queue_length(active[i]), tti_s);
    dp.subchannels = share + (i < extra ? 1 : 0);
  }
  return plan;
}

size_t SearchSpace::encoding_length() const {
  size_t len = 0;
  for (const QueueClass& c : cohorts) len += c.max_len + 1;
  return len;
}

uint64_t SearchSpace::size() const {
  uint64_t n = 1;
  for (const QueueClass& c : cohorts) {
    for (int m = 0; m < c.max_len; ++m) n = SatMul(n, tti_levels.size());
    n = SatMul(n, subch_options.size());
  }
  return n;
}

SearchSpace MakeSearchSpace(const Scenario& scn, int levels, bool grouped) {
  if (levels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one TTI level");
  }
  SearchSpace space;
  for (int i = 1; i <= levels; ++i) {
    space.tti_levels.push_back(scn.period_s * i / levels);
  }
  const std::vector<QueueClass> classes = PartitionByQueueLength(scn);
  if (grouped) {
    space.cohorts = classes;
  } else {
    for (const QueueClass& c : classes) {
      for (int k : c.members) space.cohorts.push_back({c.max_len, {k}});
    }
    std::sort(space.cohorts.begin(), space.cohorts.end(),
              [](const QueueClass& a, const QueueClass& b) {
                return a.members.front() < b.members.front();
              });
  }
  int active = 0;
  for (const QueueClass& c : classes) active += static_cast<int>(c.members.size());
  for (int s = 1; s <= scn.subchannel_count; s *= 2) {
    space.subch_options.push_back(s);
    if (s > scn.subchannel_count / 2) break;
  }
  if (active > 0 && scn.subchannel_count / active >= 1) {
    space.subch_options.push_back(scn.subchannel_count / active);
  }
  std::sort(space.subch_options.begin(), space.subch_options.end());
  space.subch_options.erase(
      std::unique(space.subch_options.begin(), space.subch_options.end()),
      space.subch_options.end());
  return space;
}

BlocklengthPlan Decode(const Scenario& scn, const SearchSpace& space,
                       std::span<const int> encoding) {
  CheckEncoding(space, encoding);
  BlocklengthPlan plan;
  plan.devices.resize(scn.devices.size());
  size_t pos = 0;
  for (const QueueClass& c : space.cohorts) {
    DevicePlan dp;
    for (int m = 0; m < c.max_len; ++m) {
      dp.ttis_s.push_back(space.tti_levels[encoding[pos++]]);
    }
    dp.subchannels = space.subch_options[encoding[pos++]];
    for (int k : c.members) plan.devices.at(k) = dp;
  }
  return plan;
}

SearchResult RandomSearch(const Scenario& scn, const SearchSpace& space,
                          int samples, uint64_t seed) {
  if (samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  }
  constexpr int kBudgetRetries = 100;
  Rng rng(seed, "random_search");
  SearchResult best;
  std::vector<int> enc(space.encoding_length());
  for (int s = 0; s < samples; ++s) {
    for (int attempt = 0; attempt < kBudgetRetries; ++attempt) {
      size_t pos = 0;
      for (const QueueClass& c : space.cohorts) {
        for (int m = 0; m < c.max_len; ++m) {
          enc[pos++] = static_cast<int>(rng.Below(space.tti_levels.size()));
        }
        enc[pos++] = static_cast<int>(rng.Below(space.subch_options.size()));
      }
      if (SubchannelsUsed(space, enc) <= scn.subchannel_count) break;
    }
    Evaluate(scn, space, enc, &best);
  }
  return best;
}

namespace {

// Keeps, per subchannel usage, the first entry of minimal delay. Any other
// entry loses to it in both the sum and the lexicographic tie-break.
std::vector<CohortEntry> Prune(std::vector<CohortEntry> table) {
  std::vector<CohortEntry> out;
  for (CohortEntry& e : table) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CohortEntry& o) {
      return o.subchannels == e.subchannels;
    });
    if (it == out.end()) {
      out.push_back(std::move(e));
    } else if (e.delay_sum < it->delay_sum) {
      *it = std::move(e);
    }
  }
  // Restore lexicographic order of the survivors.
  std::sort(out.begin(), out.end(),
            [](const CohortEntry& a, const CohortEntry& b) { return a.enc < b.enc; });
  return out;
}

SearchResult SeparableSearch(const Scenario& scn, const SearchSpace& space) {
  SearchResult best;
  const int num = static_cast<int>(space.cohorts.size());
  std::vector<std::vector<CohortEntry>> tables;
  for (const QueueClass& c : space.cohorts) {
    std::vector<CohortEntry> full = CohortTable(scn, space, c);
    best.evaluations += full.size();
    tables.push_back(Prune(std::move(full)));
    if (tables.back().empty()) return best;
  }
  if (num == 0) {
    best.found = true;
    best.plan.devices.resize(scn.devices.size());
    best.objective = PlanObjective(scn, best.plan);
    return best;
  }

  // Separable objective: the joint delay is the sum of cohort sums, and the
  // only coupling left is the subchannel budget.
  std::vector<size_t> idx(num, 0);
  std::vector<size_t> best_idx;
  double best_sum = kInf;
  while (true) {
    ++best.evaluations;
    int used = 0;
    double sum = 0.0;
    for (int c = 0; c < num; ++c) {
      used += tables[c][idx[c]].subchannels;
      sum += tables[c][idx[c]].delay_sum;
    }
    if (used <= scn.subchannel_count && sum < best_sum) {
      best_sum = sum;
      best_idx = idx;
    }
    int c = num - 1;
    while (c >= 0) {
      if (++idx[c] < tables[c].size()) break;
      idx[c] = 0;
      --c;
    }
    if (c < 0) break;
  }
  if (best_idx.empty()) return best;
  for (int c = 0; c < num; ++c) {
    const auto& e = tables[c][best_idx[c]].enc;
    best.encoding.insert(best.encoding.end(), e.begin(), e.end());
  }
  best.plan = Decode(scn, space, best.encoding);
  best.objective = PlanObjective(scn, best.plan);
  best.found = std::isfinite(best.objective);
  return best;
}

}  // namespace

SearchResult ExhaustiveSearch(const Scenario& scn, const SearchSpace& space,
                              uint64_t cap) {
  const uint64_t total = space.size();
  if (total > cap) {
    throw Error(ErrorCode::kCapExceeded,
                "search space holds " +
                    (total == UINT64_MAX ? std::string("more than 2^64")
                                         : std::to_string(total)) +
                    " plans, cap is " + std::to_string(cap));
  }
  return SeparableSearch(scn, space);
}

uint64_t CohortTableSize(const SearchSpace& space) {
  uint64_t total = 0;
  for (const QueueClass& c : space.cohorts) {
    uint64_t n = space.subch_options.size();
    for (int m = 0; m < c.max_len; ++m) n = SatMul(n, space.tti_levels.size());
    total = total > UINT64_MAX - n ? UINT64_MAX : total + n;
  }
  return total;
}

SearchResult OracleSearch(const Scenario& scn, const SearchSpace& space,
                          uint64_t cap) {
  const uint64_t total = CohortTableSize(space);
  if (total > cap) {
    throw Error(ErrorCode::kCapExceeded,
                "per-cohort tables hold " +
                    (total == UINT64_MAX ? std::string("more than 2^64")
                                         : std::to_string(total)) +
                    " settings, cap is " + std::to_string(cap));
  }
  return SeparableSearch(scn, space);
}

SearchResult LocalSearch(const Scenario& scn, const SearchSpace& space,
                         const BlocklengthPlan& init, int iters,
                         uint64_t seed) {
  if (iters < 0) throw Error(ErrorCode::kInvalidArgument, "iters must be >= 0");
  ValidatePlan(scn, init);
  SearchResult start;
  start.plan = init;
  start.objective = PlanObjective(scn, init);
  start.found = std::isfinite(start.objective);
  start.evaluations = 1;
  if (iters == 0 || space.cohorts.empty()) return start;

  Rng rng(seed, "local_search");
  std::vector<int> cur = Project(space, init);
  std::vector<int> radix;
  for (const QueueClass& c : space.cohorts) {
    radix.insert(radix.end(), c.max_len,
                 static_cast<int>(space.tti_levels.size()));
    radix.push_back(static_cast<int>(space.subch_options.size()));
  }
  SearchResult climb;
  Evaluate(scn, space, cur, &climb);
  double cur_obj = climb.found ? climb.objective : kInf;

  std::vector<std::pair<int, int>> moves;
  for (int it = 0; it < iters; ++it) {
    moves.clear();
    for (int j = 0; j < static_cast<int>(cur.size()); ++j) {
      if (cur[j] > 0) moves.push_back({j, -1});
      if (cur[j] + 1 < radix[j]) moves.push_back({j, +1});
    }
    for (size_t i = moves.size(); i > 1; --i) {
      std::swap(moves[i - 1], moves[rng.Below(i)]);
    }
    double step_obj = cur_obj;
    std::vector<int> step;
    for (const auto& [j, d] : moves) {
      std::vector<int> cand = cur;
      cand[j] += d;
      ++climb.evaluations;
      if (SubchannelsUsed(space, cand) > scn.subchannel_count) continue;
      const double obj = PlanObjective(scn, Decode(scn, space, cand));
      if (obj < step_obj) {
        step_obj = obj;
        step = std::move(cand);
      }
    }
    if (step.empty()) break;
    cur = std::move(step);
    cur_obj = step_obj;
  }

  const uint64_t evals = climb.evaluations + start.evaluations;
  if (!(cur_obj < start.objective)) {
    start.evaluations = evals;
    return start;
  }
  SearchResult out;
  out.found = true;
  out.encoding = cur;
  out.plan = Decode(scn, space, cur);
  out.objective = cur_obj;
  out.evaluations = evals;
  return out;
}

}  // namespace adablock
