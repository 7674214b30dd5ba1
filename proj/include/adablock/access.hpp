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

#ifndef ADABLOCK_ACCESS_HPP_
#define ADABLOCK_ACCESS_HPP_

namespace adablock {

// Grant-free contention: every one of device_count devices picks one of
// preamble_count preambles uniformly at random each attempt.
struct ContentionConfig {
  int device_count = 1;
  int preamble_count = 1;
};

struct AccessPoint {
  double p_one = 0;
  double p_err = 0;
  double p_suc = 0;
  double expected_retx = 0;
};

// Probability that a given preamble is picked by exactly one device.
double PSinglePreamble(const ContentionConfig& cfg);

// Probability that a tagged device's preamble is not picked by anyone else.
double PNoCollision(const ContentionConfig& cfg);

double PSuccess(double p_one, double p_err);

// Geometric PMF of the attempt count x >= 1.
double RetransmissionPmf(double p_suc, int x);

// Mean attempt count 1/p_suc. Throws InfeasibleLink when p_suc == 0.
double ExpectedRetransmissions(double p_suc);

AccessPoint MakeAccessPoint(double p_one, double p_err);

}  // namespace adablock

#endif  // ADABLOCK_ACCESS_HPP_
