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

#ifndef ADABLOCK_ERRORS_HPP_
#define ADABLOCK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace adablock {

// Mirrors adablock_status in the C header; values must stay in sync.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDomain = 2,
  kParse = 3,
  kSchema = 4,
  kInfeasible = 5,
  kCapExceeded = 6,
  kShape = 7,
  kIo = 8,
  kSingular = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when a precondition of a formula is violated (p <= 0, n <= 0, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

// A link whose success probability is zero never drains its queue.
class InfeasibleLink : public Error {
 public:
  explicit InfeasibleLink(const std::string& what)
      : Error(ErrorCode::kInfeasible, what) {}
};

}  // namespace adablock

#endif  // ADABLOCK_ERRORS_HPP_
