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

#include "adablock/access.hpp"

#include <cmath>
#include <string>

#include "adablock/errors.hpp"

namespace adablock {
namespace {

void Validate(const ContentionConfig& cfg) {
  if (cfg.device_count < 1 || cfg.preamble_count < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "contention needs at least one device and one preamble");
  }
}

void RequireProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

double PSinglePreamble(const ContentionConfig& cfg) {
  return PNoCollision(cfg) / cfg.preamble_count;
}

double PNoCollision(const ContentionConfig& cfg) {
  Validate(cfg);
  if (cfg.device_count == 1) return 1.0;
  const double m = cfg.preamble_count;
  // log1p keeps (1 - 1/M)^(K-1) accurate for large M.
  return std::exp((cfg.device_count - 1) * std::log1p(-1.0 / m));
}

double PSuccess(double p_one, double p_err) {
  RequireProbability(p_one, "p_one");
  RequireProbability(p_err, "p_err");
  return p_one * (1.0 - p_err);
}

double RetransmissionPmf(double p_suc, int x) {
  if (!(p_suc > 0.0 && p_suc <= 1.0)) {
    throw DomainError("retransmission PMF needs 0 < p_suc <= 1");
  }
  if (x < 1) throw DomainError("attempt count must be >= 1");
  return p_suc * std::pow(1.0 - p_suc, x - 1);
}

double ExpectedRetransmissions(double p_suc) {
  if (p_suc == 0.0) {
    throw InfeasibleLink("success probability is zero; queue never drains");
  }
  if (!(p_suc > 0.0 && p_suc <= 1.0)) {
    throw DomainError("expected retransmissions needs 0 < p_suc <= 1");
  }
  return 1.0 / p_suc;
}

AccessPoint MakeAccessPoint(double p_one, double p_err) {
  AccessPoint ap;
  ap.p_one = p_one;
  ap.p_err = p_err;
  ap.p_suc = PSuccess(p_one, p_err);
  ap.expected_retx = ExpectedRetransmissions(ap.p_suc);
  return ap;
}

}  // namespace adablock
