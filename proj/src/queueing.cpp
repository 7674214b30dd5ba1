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

#include "adablock/queueing.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "adablock/errors.hpp"

namespace adablock {

void ArrivalModel::Validate() const {
  if (!(rate_per_s >= 0.0) || !std::isfinite(rate_per_s)) {
    throw DomainError("arrival rate must be finite and >= 0");
  }
  if (!(horizon_s > 0.0)) throw DomainError("period T_max must be positive");
}

double ArrivalPmf(const ArrivalModel& model, int a) {
  if (a < 0) return 0.0;
  const double load = model.mean_load();
  if (load == 0.0) return a == 0 ? 1.0 : 0.0;
  return std::exp(-load + a * std::log(load) - std::lgamma(a + 1.0));
}

int MaxQueueLength(const ArrivalModel& model) {
  model.Validate();
  const double load = model.mean_load();
  const double nearest = std::round(load);
  if (std::abs(load - nearest) <= 1e-9 * std::max(1.0, load)) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(load));
}

QueueChain BuildChain(const ArrivalModel& model,
                      std::span<const double> suc_probs, TailFold fold) {
  const int len = MaxQueueLength(model);
  if (static_cast<int>(suc_probs.size()) != len) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(len) +
                    " success probabilities, got " +
                    std::to_string(suc_probs.size()));
  }
  for (double p : suc_probs) {
    if (p == 0.0) {
      throw InfeasibleLink("zero success probability makes a state absorbing");
    }
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("success probabilities must lie in (0, 1]");
    }
  }

  QueueChain chain;
  chain.max_len_ = len;
  chain.fold_ = fold;
  chain.suc_probs_.assign(suc_probs.begin(), suc_probs.end());
  chain.gen_pmf_.resize(len + 1);
  for (int a = 0; a <= len; ++a) chain.gen_pmf_[a] = ArrivalPmf(model, a);

  const int n = len + 1;
  chain.transition_.assign(static_cast<size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return chain.transition_[static_cast<size_t>(i) * n + j];
  };

  double arrive = 0.0;
  for (int m = 1; m <= len; ++m) {
    at(0, m) = chain.gen_pmf_[m];
    arrive += chain.gen_pmf_[m];
  }
  if (fold == TailFold::kIdle || len == 0) {
    at(0, 0) = 1.0 - arrive;
  } else {
    at(0, 0) = chain.gen_pmf_[0];
    at(0, len) += 1.0 - arrive - chain.gen_pmf_[0];
  }
  for (int m = 1; m <= len; ++m) {
    const double p = chain.suc_probs_[m - 1];
    at(m, m - 1) = p;
    at(m, m) = 1.0 - p;
  }
  return chain;
}

std::vector<double> SteadyStateClosedForm(const QueueChain& chain) {
  if (chain.fold() != TailFold::kIdle) {
    throw Error(ErrorCode::kInvalidArgument,
                "closed form only applies to idle-folded chains");
  }
  const int len = chain.max_len();
  std::vector<double> pi(len + 1, 0.0);
  if (len == 0) {
    pi[0] = 1.0;
    return pi;
  }
  const auto& gen = chain.gen_pmf();

  // tail[j] = sum_{l=j..M} p_gen(l)
  std::vector<double> tail(len + 2, 0.0);
  for (int j = len; j >= 1; --j) tail[j] = tail[j + 1] + gen[j];

  if (len <= 20) {
    double prod_all = 1.0;
    for (int i = 1; i <= len; ++i) prod_all *= chain.suc(i);
    double denom = prod_all;
    for (int j = 1; j <= len; ++j) {
      double prod_except = 1.0;
      for (int r = 1; r <= len; ++r) {
        if (r != j) prod_except *= chain.suc(r);
      }
      denom += prod_except * tail[j];
    }
    pi[0] = prod_all / denom;
  } else {
    // Numerator and denominator divided by prod_i p_suc_i in log space, so
    // long chains with small success probabilities do not underflow.
    double denom_scaled = 1.0;
    for (int j = 1; j <= len; ++j) {
      if (tail[j] > 0.0) {
        denom_scaled += std::exp(std::log(tail[j]) - std::log(chain.suc(j)));
      }
    }
    pi[0] = 1.0 / denom_scaled;
  }
  for (int m = 1; m <= len; ++m) pi[m] = pi[0] * tail[m] / chain.suc(m);
  return pi;
}

std::vector<double> SteadyStateSolve(const QueueChain& chain) {
  const int n = chain.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      p(chain.transition_matrix().data(), n, n);
  // Balance equations (P^T - I) pi = 0 with the last one replaced by the
  // normalization row.
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingular,
                "balance equations are singular; chain is reducible");
  }
  const Eigen::VectorXd pi = lu.solve(b);
  return std::vector<double>(pi.data(), pi.data() + n);
}

}  // namespace adablock
