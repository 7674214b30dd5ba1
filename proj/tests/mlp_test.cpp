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

#include "adablock/errors.hpp"
#include "adablock/mlp.hpp"

using namespace adablock;

TEST_CASE("zero network outputs zero") {
  const Mlp net({3, 4, 2});
  const std::vector<double> x = {0.3, -1.0, 2.0};
  CHECK(net.Forward(x).isZero());
  CHECK(net.parameter_count() == 3 * 4 + 4 + 4 * 2 + 2);
  CHECK_THROWS_AS(net.Forward(std::vector<double>{1.0}), Error);
}

TEST_CASE("Glorot initialization stays inside its bound") {
  Mlp net({5, 64, 7});
  Rng rng(3);
  net.InitGlorot(rng);
  const double bound0 = std::sqrt(6.0 / (5 + 64));
  CHECK(net.layers()[0].w.cwiseAbs().maxCoeff() <= bound0);
  CHECK(net.layers()[0].w.cwiseAbs().maxCoeff() > 0.5 * bound0);
  CHECK(net.layers()[1].b.isZero());
}

TEST_CASE("gradient matches central differences") {
  Mlp net({4, 6, 5, 3});
  Rng rng(17);
  net.InitGlorot(rng);
  for (auto& l : net.layers()) l.b.setConstant(0.05);
  const std::vector<double> x = {0.2, -0.7, 1.1, 0.4};
  const double target = 0.9;
  const int action = 1;
  const MlpGrad g = net.Gradient(x, target, action);
  auto loss = [&](const Mlp& n) {
    const double d = target - n.Forward(x)(action);
    return 0.5 * d * d;
  };
  const double h = 1e-6;
  for (size_t li = 0; li < net.layers().size(); ++li) {
    for (int i = 0; i < net.layers()[li].w.size(); ++i) {
      Mlp plus = net, minus = net;
      plus.layers()[li].w.data()[i] += h;
      minus.layers()[li].w.data()[i] -= h;
      const double fd = (loss(plus) - loss(minus)) / (2 * h);
      CHECK(g[li].w.data()[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-8));
    }
    for (int i = 0; i < net.layers()[li].b.size(); ++i) {
      Mlp plus = net, minus = net;
      plus.layers()[li].b(i) += h;
      minus.layers()[li].b(i) -= h;
      const double fd = (loss(plus) - loss(minus)) / (2 * h);
      CHECK(g[li].b(i) == doctest::Approx(fd).epsilon(1e-6).scale(1e-8));
    }
  }
}

TEST_CASE("a gradient step lowers the loss") {
  Mlp net({2, 8, 2});
  Rng rng(2);
  net.InitGlorot(rng);
  const std::vector<double> x = {1.0, 0.5};
  const double before = std::abs(3.0 - net.Forward(x)(0));
  net.Apply(net.Gradient(x, 3.0, 0), 0.05);
  CHECK(std::abs(3.0 - net.Forward(x)(0)) < before);
}
