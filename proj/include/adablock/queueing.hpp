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

// Per-device queue-length Markov chain. State 0 is idle; state m >= 1 holds
// m packets. Arrivals only happen from idle (a Poisson batch over one
// period), and an active state drains one packet per successful attempt.

#ifndef ADABLOCK_QUEUEING_HPP_
#define ADABLOCK_QUEUEING_HPP_

#include <span>
#include <vector>

namespace adablock {

struct ArrivalModel {
  double rate_per_s = 0;  // lambda
  double horizon_s = 0;   // T_max

  double mean_load() const { return rate_per_s * horizon_s; }
  void Validate() const;
};

// Where the Poisson mass above max_len goes when building the chain.
enum class TailFold {
  kIdle,      // folded into P(0 -> 0); the closed form solves this chain
  kCapAtMax,  // added to P(0 -> max_len); numeric solve only
};

class QueueChain {
 public:
  int max_len() const { return max_len_; }
  int size() const { return max_len_ + 1; }
  TailFold fold() const { return fold_; }

  // Truncated Poisson PMF, indices 0..max_len, not renormalized.
  const std::vector<double>& gen_pmf() const { return gen_pmf_; }
  // Success probability in state m is suc_probs()[m - 1].
  const std::vector<double>& suc_probs() const { return suc_probs_; }
  double suc(int m) const { return suc_probs_[m - 1]; }

  double transition(int from, int to) const {
    return transition_[static_cast<size_t>(from) * size() + to];
  }
  // Row-major (size() x size()).
  const std::vector<double>& transition_matrix() const { return transition_; }

 private:
  friend QueueChain BuildChain(const ArrivalModel&, std::span<const double>,
                               TailFold);
  int max_len_ = 0;
  TailFold fold_ = TailFold::kIdle;
  std::vector<double> gen_pmf_;
  std::vector<double> suc_probs_;
  std::vector<double> transition_;
};

double ArrivalPmf(const ArrivalModel& model, int a);

// ceil(lambda * T_max), the Poisson mean rounded up. Loads within 1e-9 of
// an integer are treated as that integer.
int MaxQueueLength(const ArrivalModel& model);

// suc_probs.size() must equal MaxQueueLength(model); every entry in (0, 1].
QueueChain BuildChain(const ArrivalModel& model,
                      std::span<const double> suc_probs,
                      TailFold fold = TailFold::kIdle);

// Closed-form stationary vector (product/sum form). Only valid for
// TailFold::kIdle chains.
std::vector<double> SteadyStateClosedForm(const QueueChain& chain);

// Stationary vector from a dense solve of pi (P - I) = 0, sum(pi) = 1.
std::vector<double> SteadyStateSolve(const QueueChain& chain);

}  // namespace adablock

#endif  // ADABLOCK_QUEUEING_HPP_
