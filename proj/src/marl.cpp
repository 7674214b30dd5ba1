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


#include "adablock/marl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "adablock/errors.hpp"

namespace adablock {
namespace {

static_assert(std::endian::native == std::endian::little,
              "weight files are written in host byte order");

void Bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

void WriteU64(std::ostream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t ReadU64(std::istream& in) {
  uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw Error(ErrorCode::kIo, "weight file is truncated");
  }
  return v;
}

void WriteDoubles(std::ostream& out, const double* p, size_t n) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void ReadDoubles(std::istream& in, double* p, size_t n) {
  if (!in.read(reinterpret_cast<char*>(p),
               static_cast<std::streamsize>(n * sizeof(double)))) {
    throw Error(ErrorCode::kIo, "weight file is truncated");
  }
}

}  // namespace

std::vector<Group> GroupDevices(const Scenario& scn) {
  std::vector<Group> out;
  for (const QueueClass& c : PartitionByQueueLength(scn)) {
    Group g;
    g.members = c.members;
    g.max_len = c.max_len;
    for (int k : c.members) g.mean_rate += scn.devices[k].rate_per_s;
    g.mean_rate /= g.size();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Group> SingletonGroups(const Scenario& scn) {
  std::vector<Group> out;
  for (int k = 0; k < scn.device_count(); ++k) {
    const int len = scn.max_queue_length(k);
    if (len > 0) out.push_back({{k}, len, scn.devices[k].rate_per_s});
  }
  return out;
}

void MarlConfig::Validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) Bad("gamma must lie in [0, 1]");
  if (!(beta > 0.0 && eta >= beta)) Bad("need eta >= beta > 0");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 &&
        epsilon_end <= 1.0)) {
    Bad("epsilon bounds must lie in [0, 1]");
  }
  if (omega1 > 0.0 || omega2 > 0.0 || omega3 > 0.0) {
    Bad("reward weights must be <= 0");
  }
  if (tti_levels < 1) Bad("tti_levels must be >= 1");
  if (replay_capacity < 1 || batch_size < 1) {
    Bad("replay capacity and batch size must be >= 1");
  }
  if (target_sync_period < 1) Bad("target sync period must be >= 1");
  if (episodes < 0) Bad("episodes must be >= 0");
  if (updates_per_step < 1) Bad("updates_per_step must be >= 1");
  if (eval_interval < 0) Bad("eval_interval must be >= 0");
  for (int h : hidden_layers) {
    if (h < 1) Bad("hidden layer sizes must be >= 1");
  }
}

double MarlConfig::EpsilonAt(int episode) const {
  const int span = epsilon_decay_episodes < 0 ? episodes : epsilon_decay_episodes;
  if (span <= 1) return episode <= 0 ? epsilon_start : epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(episode) / (span - 1));
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

MarlEnv::MarlEnv(const Scenario& scn, const MarlConfig& cfg)
    : scn_(scn), cfg_(cfg) {
  scn_.Validate();
  cfg_.Validate();
  groups_ = cfg_.cooperative ? GroupDevices(scn_) : SingletonGroups(scn_);
  space_ = MakeSearchSpace(scn_, cfg_.tti_levels, cfg_.cooperative);
  for (const Group& g : groups_) max_len_ = std::max(max_len_, g.max_len);
  omega3_ = cfg_.omega3 != 0.0
                ? cfg_.omega3
                : cfg_.omega1 * scn_.period_s * static_cast<double>(agent_count());
  starve_delay_ =
      cfg_.starve_delay_s > 0.0 ? cfg_.starve_delay_s : 10.0 * scn_.period_s;
  remaining_ = scn_.subchannel_count;
  min_remaining_ = scn_.subchannel_count;
  for (const Group& g : groups_) {
    min_remaining_ -= g.size() * space_.subch_options.back();
  }
  plan_.devices.resize(scn_.devices.size());
}

int MarlEnv::action_count() const {
  return static_cast<int>(space_.tti_levels.size() * space_.subch_options.size());
}

Action MarlEnv::Unflatten(int a) const {
  const int s = static_cast<int>(space_.subch_options.size());
  return {a / s, a % s};
}

int MarlEnv::Flatten(const Action& a) const {
  return a.tti * static_cast<int>(space_.subch_options.size()) + a.subch;
}

std::vector<std::vector<double>> MarlEnv::Reset() {
  if (groups_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no active devices to plan for");
  }
  position_ = 1;
  remaining_ = scn_.subchannel_count;
  consumed_.assign(groups_.size(), 0.0);
  plan_ = BlocklengthPlan{};
  plan_.devices.resize(scn_.devices.size());
  for (const Group& g : groups_) {
    for (int k : g.members) {
      plan_.devices[k].ttis_s.assign(g.max_len, 0.0);
      plan_.devices[k].subchannels = 0;
    }
  }
  return Observe();
}

std::vector<std::vector<double>> MarlEnv::Observe() const {
  const double scale = std::max(1, max_len_);
  std::vector<std::vector<double>> obs;
  for (size_t g = 0; g < groups_.size(); ++g) {
    const Group& grp = groups_[g];
    std::vector<double> o = {
        grp.mean_rate * scn_.period_s / scale,
        grp.max_len / scale,
        static_cast<double>(remaining_ - min_remaining_) /
            (scn_.subchannel_count - min_remaining_),
        std::min(position_, max_len_) / scale,
    };
    if (cfg_.period_feature) {
      o.push_back(std::min(1.0, consumed_[g] / scn_.period_s));
    }
    obs.push_back(std::move(o));
  }
  return obs;
}

StepResult MarlEnv::Step(std::span<const Action> actions) {
  if (position_ > max_len_ || groups_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "episode already finished");
  }
  if (actions.size() != groups_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "need one action per agent");
  }
  const int levels = static_cast<int>(space_.tti_levels.size());
  const int options = static_cast<int>(space_.subch_options.size());
  for (const Action& a : actions) {
    if (a.tti < 0 || a.tti >= levels || a.subch < 0 || a.subch >= options) {
      throw Error(ErrorCode::kInvalidArgument, "action out of range");
    }
  }
  for (size_t g = 0; g < groups_.size(); ++g) {
    const Group& grp = groups_[g];
    if (position_ == 1) {
      const int v = space_.subch_options[actions[g].subch];
      for (int k : grp.members) plan_.devices[k].subchannels = v;
      remaining_ -= v * grp.size();
    }
    if (position_ <= grp.max_len) {
      const double t = space_.tti_levels[actions[g].tti];
      for (int k : grp.members) plan_.devices[k].ttis_s[position_ - 1] = t;
      consumed_[g] += t;
    }
  }
  ++position_;
  StepResult res;
  res.done = position_ > max_len_;
  res.obs = Observe();
  res.rewards.assign(groups_.size(), 0.0);
  if (res.done) {
    RewardBreakdown rb = Score(plan_);
    res.rewards = std::move(rb.agent_reward);
    res.global_reward = rb.reward;
  }
  return res;
}

RewardBreakdown MarlEnv::Score(const BlocklengthPlan& plan) const {
  ValidatePlan(scn_, plan);
  RewardBreakdown rb;
  const double num = scn_.device_count();
  int used = 0;
  for (const DevicePlan& dp : plan.devices) used += dp.subchannels;
  rb.subch_cost = used > scn_.subchannel_count ? 1 : 0;
  for (const Group& grp : groups_) {
    int zeta = 0;
    double sum = 0.0;
    for (int k : grp.members) {
      const DevicePlan& dp = plan.devices[k];
      if (!DevicePeriodOk(scn_, dp) || !DeviceRateOk(scn_, dp, k)) zeta = 1;
      double d = starve_delay_;
      try {
        d = ComputeDeviceDelay(scn_, plan, k).total;
      } catch (const InfeasibleLink&) {
      }
      if (!(d < starve_delay_)) {
        d = starve_delay_;
        zeta = 1;
      }
      sum += d;
    }
    rb.group_delay.push_back(sum / num);
    rb.trans_cost.push_back(zeta);
  }
  const double subch_term = omega3_ * rb.subch_cost;
  rb.reward = subch_term;
  for (size_t g = 0; g < groups_.size(); ++g) {
    const double own =
        cfg_.omega1 * rb.group_delay[g] + cfg_.omega2 * rb.trans_cost[g];
    rb.reward += own;
    rb.agent_reward.push_back(own + subch_term);
  }
  if (cfg_.cooperative) rb.agent_reward.assign(groups_.size(), rb.reward);
  return rb;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) Bad("replay capacity must be >= 1");
  items_.reserve(std::min(capacity, 1 << 16));
}

void ReplayBuffer::Push(Experience e) {
  if (size() < capacity_) {
    items_.push_back(std::move(e));
    return;
  }
  items_[head_] = std::move(e);
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size()) Bad("replay index out of range");
  return items_[(head_ + i) % size()];
}

std::vector<int> ReplayBuffer::SampleIndices(int n, Rng& rng) const {
  if (items_.empty()) Bad("cannot sample an empty replay buffer");
  std::vector<int> idx(n);
  for (int& i : idx) i = static_cast<int>(rng.Below(items_.size()));
  return idx;
}

Agent MakeAgent(int obs_dim, int actions, const MarlConfig& cfg, Rng& init) {
  std::vector<int> sizes = {obs_dim};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(actions);
  Agent a{Mlp(sizes), Mlp(), ReplayBuffer(cfg.replay_capacity)};
  a.online.InitGlorot(init);
  a.target = a.online;
  return a;
}

int GreedyAction(const Mlp& net, std::span<const double> obs) {
  const Eigen::VectorXd q = net.Forward(obs);
  int best = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return best;
}

int AgentAct(const Agent& agent, std::span<const double> obs, double epsilon,
             Rng& rng) {
  if (rng.Bernoulli(epsilon)) {
    return static_cast<int>(rng.Below(agent.online.output_dim()));
  }
  return GreedyAction(agent.online, obs);
}

double HystereticUpdate(Agent& agent, std::span<const Experience> batch,
                        const MarlConfig& cfg) {
  if (batch.empty()) return 0.0;
  MlpGrad up = agent.online.ZeroGrad();
  MlpGrad down = agent.online.ZeroGrad();
  const double inv = 1.0 / batch.size();
  double loss = 0.0;
  for (const Experience& e : batch) {
    double y = e.reward;
    if (!e.terminal) y += cfg.gamma * agent.target.Forward(e.next_obs).maxCoeff();
    const double q = agent.online.Forward(e.obs)(e.action);
    const double delta = y - q;
    loss += delta * delta;
    agent.online.AccumulateGradient(e.obs, y, e.action, inv,
                                    delta >= 0.0 ? &up : &down);
  }
  agent.online.Apply(up, cfg.eta);
  agent.online.Apply(down, cfg.beta);
  return loss * inv;
}

void SyncTarget(Agent& agent) { agent.target = agent.online; }

BlocklengthPlan GreedyPlan(MarlEnv& env, const std::vector<Agent>& agents,
                           double* reward) {
  std::vector<std::vector<double>> obs = env.Reset();
  std::vector<Action> actions(agents.size());
  while (true) {
    for (size_t g = 0; g < agents.size(); ++g) {
      actions[g] = env.Unflatten(GreedyAction(agents[g].online, obs[g]));
    }
    StepResult res = env.Step(actions);
    if (res.done) {
      if (reward != nullptr) *reward = res.global_reward;
      return env.plan();
    }
    obs = std::move(res.obs);
  }
}

MarlRun Train(const Scenario& scn, const MarlConfig& cfg, uint64_t seed) {
  MarlEnv env(scn, cfg);
  MarlRun run;
  run.config = cfg;
  run.groups = env.groups();
  const int num = env.agent_count();
  run.best_objective = std::numeric_limits<double>::infinity();
  if (num == 0) {
    run.greedy_plan.devices.resize(scn.devices.size());
    run.greedy_objective = PlanObjective(scn, run.greedy_plan);
    run.best_plan = run.greedy_plan;
    run.best_objective = run.greedy_objective;
    return run;
  }

  std::vector<Rng> act_rng;
  std::vector<Rng> sample_rng;
  for (int g = 0; g < num; ++g) {
    const std::string id = std::to_string(g);
    Rng init(seed, "marl/init/" + id);
    run.agents.push_back(
        MakeAgent(env.observation_dim(), env.action_count(), cfg, init));
    act_rng.emplace_back(seed, "marl/act/" + id);
    sample_rng.emplace_back(seed, "marl/replay/" + id);
  }

  std::vector<Action> actions(num);
  std::vector<int> flat(num);
  std::vector<Experience> batch;
  std::vector<Agent> kept;
  double kept_reward = 0.0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = cfg.EpsilonAt(ep);
    std::vector<std::vector<double>> obs = env.Reset();
    double loss_sum = 0.0;
    int loss_n = 0;
    double ep_reward = 0.0;
    bool done = false;
    while (!done) {
      for (int g = 0; g < num; ++g) {
        flat[g] = AgentAct(run.agents[g], obs[g], eps, act_rng[g]);
        actions[g] = env.Unflatten(flat[g]);
      }
      StepResult res = env.Step(actions);
      done = res.done;
      ep_reward += res.global_reward;
      for (int g = 0; g < num; ++g) {
        run.agents[g].replay.Push(
            {obs[g], flat[g], res.rewards[g], res.obs[g], res.done});
      }
      for (int u = 0; u < cfg.updates_per_step; ++u) {
        bool updated = false;
        for (int g = 0; g < num; ++g) {
          Agent& a = run.agents[g];
          if (a.replay.size() < cfg.batch_size) continue;
          batch.clear();
          for (int i : a.replay.SampleIndices(cfg.batch_size, sample_rng[g])) {
            batch.push_back(a.replay.at(i));
          }
          loss_sum += HystereticUpdate(a, batch, cfg);
          ++loss_n;
          updated = true;
        }
        if (updated && ++run.updates % cfg.target_sync_period == 0) {
          for (Agent& a : run.agents) SyncTarget(a);
        }
      }
      obs = std::move(res.obs);
    }
    run.rewards.push_back(ep_reward);
    run.losses.push_back(loss_n > 0 ? loss_sum / loss_n : 0.0);
    run.epsilons.push_back(eps);
    const double obj = PlanObjective(scn, env.plan());
    if (obj < run.best_objective) {
      run.best_objective = obj;
      run.best_plan = env.plan();
    }
    if (cfg.eval_interval > 0 && ((ep + 1) % cfg.eval_interval == 0 ||
                                  ep + 1 == cfg.episodes)) {
      double r = 0.0;
      GreedyPlan(env, run.agents, &r);
      run.eval_episodes.push_back(ep);
      run.eval_rewards.push_back(r);
      if (kept.empty() || r > kept_reward) {
        kept = run.agents;
        kept_reward = r;
        run.selected_episode = ep;
      }
    }
  }

  if (!kept.empty()) {
    run.agents = std::move(kept);
  } else {
    run.selected_episode = cfg.episodes - 1;
  }
  run.greedy_plan = GreedyPlan(env, run.agents, &run.greedy_reward);
  run.greedy_objective = PlanObjective(scn, run.greedy_plan);
  if (!std::isfinite(run.best_objective)) run.best_plan = run.greedy_plan;
  return run;
}

void SaveWeights(std::ostream& out, const std::vector<Agent>& agents) {
  WriteU64(out, agents.size());
  const std::vector<int> sizes =
      agents.empty() ? std::vector<int>{} : agents.front().online.sizes();
  WriteU64(out, sizes.size());
  for (int s : sizes) WriteU64(out, static_cast<uint64_t>(s));
  for (const Agent& a : agents) {
    if (a.online.sizes() != sizes) {
      throw Error(ErrorCode::kShape, "agents have different network shapes");
    }
    for (const DenseLayer& l : a.online.layers()) {
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                          Eigen::RowMajor>
          rm = l.w;
      WriteDoubles(out, rm.data(), rm.size());
      WriteDoubles(out, l.b.data(), l.b.size());
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write weights");
}

std::vector<Mlp> LoadWeights(std::istream& in) {
  constexpr uint64_t kMaxCount = 1 << 20;
  const uint64_t count = ReadU64(in);
  const uint64_t depth = ReadU64(in);
  if (count > kMaxCount || depth > 64 || (count > 0 && depth < 2)) {
    throw Error(ErrorCode::kParse, "weight file header is implausible");
  }
  std::vector<int> sizes;
  for (uint64_t i = 0; i < depth; ++i) {
    const uint64_t s = ReadU64(in);
    if (s < 1 || s > kMaxCount) {
      throw Error(ErrorCode::kParse, "weight file layer size is implausible");
    }
    sizes.push_back(static_cast<int>(s));
  }
  std::vector<Mlp> nets;
  for (uint64_t a = 0; a < count; ++a) {
    Mlp net(sizes);
    for (DenseLayer& l : net.layers()) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
          l.w.rows(), l.w.cols());
      ReadDoubles(in, rm.data(), rm.size());
      l.w = rm;
      ReadDoubles(in, l.b.data(), l.b.size());
    }
    nets.push_back(std::move(net));
  }
  return nets;
}

}  // namespace adablock
