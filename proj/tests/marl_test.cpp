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
#include <map>
#include <sstream>

#include "adablock/baselines.hpp"
#include "adablock/errors.hpp"
#include "adablock/marl.hpp"

using namespace adablock;

namespace {

Scenario Loads(std::vector<double> loads) {
  Scenario s;
  s.subchannel_count = 40;
  s.preamble_count = 20;
  for (double l : loads) s.devices.push_back({l / s.period_s, 150});
  return s;
}

MarlConfig Small() {
  MarlConfig c;
  c.tti_levels = 4;
  c.hidden_layers = {16};
  c.episodes = 60;
  c.batch_size = 8;
  c.eval_interval = 20;
  return c;
}

}  // namespace

TEST_CASE("grouping by queue length") {
  const auto g = GroupDevices(Loads({0.5, 0.9, 2.2}));
  REQUIRE(g.size() == 2);
  CHECK(g[0].max_len == 1);
  CHECK(g[0].size() == 2);
  CHECK(g[1].max_len == 3);
  CHECK(g[1].members == std::vector<int>{2});
  CHECK(GroupDevices(Loads({0, 0})).empty());
  CHECK(GroupDevices(Loads({1.5, 1.5, 1.5})).size() == 1);
  CHECK(SingletonGroups(Loads({0.5, 0, 2.2})).size() == 2);
}

TEST_CASE("environment reset and observations") {
  MarlConfig cfg = Small();
  MarlEnv env(Loads({0.5, 0.9, 2.2}), cfg);
  const auto obs = env.Reset();
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].size() == 5);
  CHECK(obs[0][2] == 1.0);  // full pool
  CHECK(env.position() == 1);
  CHECK(obs[0][4] == 0.0);
  CHECK(env.episode_length() == 3);

  cfg.cooperative = false;
  MarlEnv twins(Loads({1.2, 1.2}), cfg);
  const auto o = twins.Reset();
  REQUIRE(o.size() == 2);
  CHECK(o[0] == o[1]);

  CHECK_THROWS_AS(MarlEnv(Loads({0.0}), Small()).Reset(), Error);
}

TEST_CASE("single short group: reward matches the delay model") {
  MarlConfig cfg = Small();
  const Scenario s = Loads({0.4, 0.6});
  MarlEnv env(s, cfg);
  env.Reset();
  const Action a{2, 1};
  const StepResult r = env.Step(std::vector<Action>{a});
  CHECK(r.done);
  const double obj = PlanObjective(s, env.plan());
  REQUIRE(std::isfinite(obj));
  CHECK(r.global_reward == doctest::Approx(cfg.omega1 * obj).epsilon(1e-12));
  CHECK_THROWS_AS(env.Step(std::vector<Action>{a}), Error);
}

TEST_CASE("overusing subchannels costs omega3") {
  MarlConfig cfg = Small();
  Scenario s = Loads({0.4, 0.6, 0.3});
  s.subchannel_count = 4;
  MarlEnv env(s, cfg);
  env.Reset();
  const int top = static_cast<int>(env.space().subch_options.size()) - 1;
  const StepResult r = env.Step(std::vector<Action>{{3, top}});
  const RewardBreakdown b = env.Score(env.plan());
  CHECK(b.subch_cost == 1);
  CHECK(env.omega3() < 0);
  CHECK(r.global_reward <= env.omega3());
}

TEST_CASE("epsilon-greedy action choice") {
  MarlConfig cfg = Small();
  Rng init(1);
  Agent agent = MakeAgent(5, 12, cfg, init);
  const std::vector<double> obs = {0.1, 0.2, 0.3, 0.4, 0.5};
  Rng rng(9);
  std::vector<int> counts(12, 0);
  const int draws = 12000;
  for (int i = 0; i < draws; ++i) ++counts[AgentAct(agent, obs, 1.0, rng)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  CHECK(chi2 < 31.3);  // 11 dof, p = 0.001

  agent.online.layers().back().b(7) = 1e6;
  for (int i = 0; i < 100; ++i) CHECK(AgentAct(agent, obs, 0.0, rng) == 7);
  CHECK(GreedyAction(Mlp({5, 3}), obs) == 0);  // ties to the lowest
}

TEST_CASE("hysteresis with equal rates is a plain DQN step") {
  MarlConfig cfg = Small();
  cfg.beta = cfg.eta;
  Rng init(4);
  Agent agent = MakeAgent(3, 4, cfg, init);
  Rng rng(8);
  std::vector<Experience> batch;
  for (int i = 0; i < 8; ++i) {
    Experience e;
    e.obs = {rng.Uniform(), rng.Uniform(), rng.Uniform()};
    e.next_obs = {rng.Uniform(), rng.Uniform(), rng.Uniform()};
    e.action = static_cast<int>(rng.Below(4));
    e.reward = rng.Uniform(-2, 2);
    e.terminal = i % 3 == 0;
    batch.push_back(e);
  }
  // Reference: one SGD step on the mean squared TD error.
  Mlp ref = agent.online;
  MlpGrad sum = ref.ZeroGrad();
  for (const Experience& e : batch) {
    double y = e.reward;
    if (!e.terminal) y += cfg.gamma * agent.target.Forward(e.next_obs).maxCoeff();
    const MlpGrad g = agent.online.Gradient(e.obs, y, e.action);
    for (size_t l = 0; l < g.size(); ++l) {
      sum[l].w += g[l].w / batch.size();
      sum[l].b += g[l].b / batch.size();
    }
  }
  ref.Apply(sum, cfg.eta);
  HystereticUpdate(agent, batch, cfg);
  for (size_t l = 0; l < ref.layers().size(); ++l) {
    CHECK((ref.layers()[l].w - agent.online.layers()[l].w).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ref.layers()[l].b - agent.online.layers()[l].b).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("negative errors move the weights by beta over eta") {
  MarlConfig sym = Small();
  sym.beta = sym.eta;
  MarlConfig hyst = Small();
  Rng init(6);
  const Agent start = MakeAgent(3, 4, sym, init);
  std::vector<Experience> batch;
  for (int i = 0; i < 6; ++i) {
    batch.push_back({{0.1 * i, 0.5, -0.2}, i % 4, -1e3, {0.0, 0.0, 0.0}, true});
  }
  Agent a = start, b = start;
  HystereticUpdate(a, batch, sym);
  HystereticUpdate(b, batch, hyst);
  for (size_t l = 0; l < start.online.layers().size(); ++l) {
    const Eigen::MatrixXd da = a.online.layers()[l].w - start.online.layers()[l].w;
    const Eigen::MatrixXd db = b.online.layers()[l].w - start.online.layers()[l].w;
    CHECK((db - da * (hyst.beta / hyst.eta)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SyncTarget(b);
  CHECK(b.target == b.online);
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    Experience e;
    e.action = i;
    buf.Push(e);
  }
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).action == 2);
  CHECK(buf.at(2).action == 4);
  Rng rng(12);
  std::map<int, int> hits;
  for (int idx : buf.SampleIndices(30000, rng)) ++hits[idx];
  for (int i = 0; i < 3; ++i) CHECK(hits[i] == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("training is reproducible and weights round-trip") {
  const Scenario s = Loads({0.4, 1.7, 0.8, 2.6});
  const MarlConfig cfg = Small();
  const MarlRun a = Train(s, cfg, 5);
  const MarlRun b = Train(s, cfg, 5);
  CHECK(a.rewards == b.rewards);
  CHECK(a.losses == b.losses);
  CHECK(a.greedy_objective == b.greedy_objective);
  CHECK(a.rewards.size() == 60);
  CHECK(a.epsilons.front() == doctest::Approx(0.99));
  CHECK(a.epsilons.back() == doctest::Approx(0.05));
  CHECK(a.eval_episodes == std::vector<int>{19, 39, 59});

  std::stringstream buf;
  SaveWeights(buf, a.agents);
  const std::vector<Mlp> nets = LoadWeights(buf);
  REQUIRE(nets.size() == a.agents.size());
  for (size_t i = 0; i < nets.size(); ++i) CHECK(nets[i] == a.agents[i].online);

  std::stringstream cut(buf.str().substr(0, 20));
  CHECK_THROWS_AS(LoadWeights(cut), Error);
}

TEST_CASE("config validation") {
  MarlConfig c;
  c.beta = 0.1;  // above eta
  CHECK_THROWS_AS(c.Validate(), Error);
  c = MarlConfig{};
  c.omega1 = 5;
  CHECK_THROWS_AS(c.Validate(), Error);
}
