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


#include "adablock/mlp.hpp"

#include <cmath>
#include <string>

#include "adablock/errors.hpp"

namespace adablock {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw Error(ErrorCode::kShape, "network needs an input and an output size");
  }
  for (int s : sizes_) {
    if (s < 1) throw Error(ErrorCode::kShape, "layer sizes must be >= 1");
  }
  for (size_t i = 0; i + 1 < sizes_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[i + 1], sizes_[i]),
                       Eigen::VectorXd::Zero(sizes_[i + 1])});
  }
}

void Mlp::InitGlorot(Rng& rng) {
  for (DenseLayer& l : layers_) {
    const double limit = std::sqrt(6.0 / (l.w.rows() + l.w.cols()));
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
        l.w(r, c) = rng.Uniform(-limit, limit);
      }
    }
    l.b.setZero();
  }
}

size_t Mlp::parameter_count() const {
  size_t n = 0;
  for (const DenseLayer& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

Eigen::VectorXd Mlp::Forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw Error(ErrorCode::kShape, "input has " + std::to_string(x.size()) +
                                       " entries, network expects " +
                                       std::to_string(input_dim()));
  }
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  for (size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].w * h + layers_[i].b;
    if (i + 1 < layers_.size()) h = h.cwiseMax(0.0);
  }
  return h;
}

MlpGrad Mlp::ZeroGrad() const {
  MlpGrad g;
  for (const DenseLayer& l : layers_) {
    g.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                 Eigen::VectorXd::Zero(l.b.size())});
  }
  return g;
}

double Mlp::AccumulateGradient(std::span<const double> x, double target,
                               int action, double scale, MlpGrad* grad) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw Error(ErrorCode::kShape, "input length does not match network");
  }
  if (action < 0 || action >= output_dim()) {
    throw Error(ErrorCode::kShape, "action index outside the output layer");
  }
  if (grad->size() != layers_.size()) {
    throw Error(ErrorCode::kShape, "gradient does not match network");
  }
  // Keep every layer's input for the backward pass.
  std::vector<Eigen::VectorXd> acts;
  acts.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()));
  for (size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd z = layers_[i].w * acts.back() + layers_[i].b;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const double q = acts.back()(action);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(output_dim());
  delta(action) = scale * (q - target);
  for (size_t i = layers_.size(); i-- > 0;) {
    (*grad)[i].w.noalias() += delta * acts[i].transpose();
    (*grad)[i].b += delta;
    if (i == 0) break;
    Eigen::VectorXd back = layers_[i].w.transpose() * delta;
    for (Eigen::Index j = 0; j < back.size(); ++j) {
      if (acts[i](j) <= 0.0) back(j) = 0.0;
    }
    delta = std::move(back);
  }
  return q;
}

MlpGrad Mlp::Gradient(std::span<const double> x, double target,
                      int action) const {
  MlpGrad g = ZeroGrad();
  AccumulateGradient(x, target, action, 1.0, &g);
  return g;
}

void Mlp::Apply(const MlpGrad& grad, double lr) {
  for (size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].w -= lr * grad[i].w;
    layers_[i].b -= lr * grad[i].b;
  }
}

bool Mlp::operator==(const Mlp& o) const {
  if (sizes_ != o.sizes_) return false;
  for (size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].w != o.layers_[i].w || layers_[i].b != o.layers_[i].b) {
      return false;
    }
  }
  return true;
}

}  // namespace adablock
