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


// Small dense network with ReLU hidden layers and a linear head, plus the
// exact gradient of 0.5 (target - Q[a])^2 used by the Q-learning update.

#ifndef ADABLOCK_MLP_HPP_
#define ADABLOCK_MLP_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "adablock/rng.hpp"

namespace adablock {

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
};

// Same shapes as the network's layers.
using MlpGrad = std::vector<DenseLayer>;

class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}; weights start at zero.
  explicit Mlp(std::vector<int> sizes);

  // Glorot-uniform weights, zero biases.
  void InitGlorot(Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Throws Error(kShape) on a wrong input length.
  Eigen::VectorXd Forward(std::span<const double> x) const;

  MlpGrad ZeroGrad() const;
  // Adds scale * d/dtheta [0.5 (target - Q(x)[action])^2] to *grad and
  // returns Q(x)[action].
  double AccumulateGradient(std::span<const double> x, double target,
                            int action, double scale, MlpGrad* grad) const;
  MlpGrad Gradient(std::span<const double> x, double target, int action) const;

  // theta -= lr * grad
  void Apply(const MlpGrad& grad, double lr);

  bool operator==(const Mlp& o) const;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

}  // namespace adablock

#endif  // ADABLOCK_MLP_HPP_
