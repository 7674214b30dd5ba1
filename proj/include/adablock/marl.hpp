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


// Cooperative multi-agent DQN over grouped devices.
//
// Devices with the same maximum queue length form one group, and each group
// is one agent. An episode builds a plan position by position: at step l
// every agent picks a (TTI level, subchannel option) pair, the TTI goes to
// queue position l of all members, and the subchannel option (a per-device
// count) only binds at step 1. The episode ends after max_g M_g steps with
// a sparse terminal reward
//
//   r = sum_g (w1 D_g + w2 zeta_trans_g) + w3 zeta_subc,
//
// where D_g is the group's share of the average delay, so that sum_g D_g is
// the plan's average delay.
//
// Observation, all in [0, 1]: group mean load / max M, group M / max M,
// remaining subchannels (0 at the largest possible overuse, 1 when none are
// assigned), position l / max M, and (by default) the fraction of the
// period the group has already used.

#ifndef ADABLOCK_MARL_HPP_
#define ADABLOCK_MARL_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adablock/baselines.hpp"
#include "adablock/delaymodel.hpp"
#include "adablock/mlp.hpp"
#include "adablock/rng.hpp"

namespace adablock {

struct Group {
  std::vector<int> members;
  int max_len = 0;
  double mean_rate = 0;  // packets per second

  int size() const { return static_cast<int>(members.size()); }
};

// Groups by max queue length, ascending; idle devices are left out.
std::vector<Group> GroupDevices(const Scenario& scn);
// One single-device group per active device, by device index.
std::vector<Group> SingletonGroups(const Scenario& scn);

struct MarlConfig {
  double gamma = 0.9;
  double eta = 0.01;    // step size for non-negative TD errors
  double beta = 0.001;  // step size for negative TD errors
  double epsilon_start = 0.99;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = -1;  // -1: the whole run
  double omega1 = -1000;
  double omega2 = -1;
  double omega3 = 0;  // 0: omega1 * T_max * G
  int tti_levels = 10;
  int replay_capacity = 10'000;
  int batch_size = 32;
  int target_sync_period = 200;  // in update steps
  int episodes = 2000;
  std::vector<int> hidden_layers = {64, 64};
  // Delay charged for a device whose link starves or whose delay exceeds
  // this value (it also counts as a transmission failure); <= 0 means
  // 10 T_max.
  double starve_delay_s = 0;
  // Off: the independent-DQN comparator (one agent per device, each
  // rewarded for its own devices only).
  bool cooperative = true;
  // Adds the consumed-period fraction to the observation.
  bool period_feature = true;
  // Gradient steps per agent and environment step.
  int updates_per_step = 1;
  // Every this many episodes the greedy policy is rolled out and the
  // weights with the best greedy reward are kept; 0 keeps the final
  // weights.
  int eval_interval = 50;

  void Validate() const;
  double EpsilonAt(int episode) const;
};

struct Action {
  int tti = 0;
  int subch = 0;
};

struct RewardBreakdown {
  std::vector<double> group_delay;  // D_g, seconds
  std::vector<int> trans_cost;      // zeta_trans_g
  int subch_cost = 0;               // zeta_subc
  double reward = 0;                // global reward
  std::vector<double> agent_reward;  // what each agent learns from
};

struct StepResult {
  std::vector<std::vector<double>> obs;
  std::vector<double> rewards;  // per agent
  double global_reward = 0;
  bool done = false;
};

class MarlEnv {
 public:
  MarlEnv(const Scenario& scn, const MarlConfig& cfg);

  const Scenario& scenario() const { return scn_; }
  const std::vector<Group>& groups() const { return groups_; }
  const SearchSpace& space() const { return space_; }
  int agent_count() const { return static_cast<int>(groups_.size()); }
  int observation_dim() const { return cfg_.period_feature ? 5 : 4; }
  int action_count() const;
  int episode_length() const { return max_len_; }
  double omega3() const { return omega3_; }

  std::vector<std::vector<double>> Reset();
  // Throws Error(kInvalidArgument) for out-of-range actions or a step after
  // the episode ended.
  StepResult Step(std::span<const Action> actions);

  int position() const { return position_; }  // 1-based next step
  int remaining_subchannels() const { return remaining_; }
  const BlocklengthPlan& plan() const { return plan_; }

  // Reward terms for a complete plan built from this env's groups.
  RewardBreakdown Score(const BlocklengthPlan& plan) const;

  Action Unflatten(int a) const;
  int Flatten(const Action& a) const;

 private:
  std::vector<std::vector<double>> Observe() const;

  Scenario scn_;
  MarlConfig cfg_;
  std::vector<Group> groups_;
  SearchSpace space_;
  int max_len_ = 0;
  double omega3_ = 0;
  double starve_delay_ = 0;
  int position_ = 1;
  int remaining_ = 0;
  int min_remaining_ = 0;  // after the largest possible allocation
  std::vector<double> consumed_;
  BlocklengthPlan plan_;
};

struct Experience {
  std::vector<double> obs;
  int action = 0;  // flattened (tti, subch)
  double reward = 0;
  std::vector<double> next_obs;
  bool terminal = false;
};

// FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity = 1);
  void Push(Experience e);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  // Oldest first.
  const Experience& at(int i) const;
  std::vector<int> SampleIndices(int n, Rng& rng) const;

 private:
  int capacity_;
  int head_ = 0;  // slot of the oldest item once full
  std::vector<Experience> items_;
};

struct Agent {
  Mlp online;
  Mlp target;
  ReplayBuffer replay;
};

Agent MakeAgent(int obs_dim, int actions, const MarlConfig& cfg, Rng& init);

// Epsilon-greedy; greedy ties go to the lowest index.
int AgentAct(const Agent& agent, std::span<const double> obs, double epsilon,
             Rng& rng);
int GreedyAction(const Mlp& net, std::span<const double> obs);

// One SGD step on the batch; returns the mean squared TD error before the
// step.
double HystereticUpdate(Agent& agent, std::span<const Experience> batch,
                        const MarlConfig& cfg);

void SyncTarget(Agent& agent);

struct MarlRun {
  MarlConfig config;
  std::vector<Group> groups;
  std::vector<Agent> agents;
  std::vector<double> rewards;  // global reward per episode
  std::vector<double> losses;   // mean update loss per episode
  std::vector<double> epsilons;
  std::vector<int> eval_episodes;  // greedy checkpoints
  std::vector<double> eval_rewards;
  int selected_episode = -1;       // checkpoint the returned agents come from
  BlocklengthPlan greedy_plan;
  double greedy_reward = 0;
  double greedy_objective = 0;  // PlanObjective, +inf if infeasible
  BlocklengthPlan best_plan;    // best feasible plan seen while training
  double best_objective = 0;
  uint64_t updates = 0;
};

MarlRun Train(const Scenario& scn, const MarlConfig& cfg, uint64_t seed);

// Deterministic rollout with epsilon = 0.
BlocklengthPlan GreedyPlan(MarlEnv& env, const std::vector<Agent>& agents,
                           double* reward = nullptr);

// Little-endian: uint64 agent count, uint64 layer-size count, the sizes,
// then per agent and layer the row-major weight matrix and the bias.
void SaveWeights(std::ostream& out, const std::vector<Agent>& agents);
std::vector<Mlp> LoadWeights(std::istream& in);

}  // namespace adablock

#endif  // ADABLOCK_MARL_HPP_
