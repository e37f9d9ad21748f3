// Copyright 2026 The randproj Authors
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

#ifndef RANDPROJ_TYPES_H_
#define RANDPROJ_TYPES_H_

#include <stdexcept>
#include <string>

#include "Eigen/Core"

namespace randproj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Default scale-relative membership tolerance: |violation| <= tol * (1 + ||x||).
inline constexpr double kMembershipTol = 1e-9;

// Broad failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kInvalidInput,
  kNumericalFailure,
  kVerificationFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// A set whose data violates its invariants (zero normal, negative radius, ...).
class InvalidSetError : public Error {
 public:
  explicit InvalidSetError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, "invalid set: " + what) {}
};

// Bad configuration or input data (zero minibatch, empty family, ...).
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

// An aggregated constraint 0 <= S^T b with S^T b < 0: the sketch itself is
// empty, so the original system is infeasible.
class InfeasibleAggregateError : public Error {
 public:
  explicit InfeasibleAggregateError(const std::string& what)
      : Error(ErrorKind::kInvalidInput, "infeasible aggregate: " + what) {}
};

// A separating/supporting cut with zero normal at a non-member point. Only
// reachable through a tolerance breach.
class DegenerateCutError : public Error {
 public:
  explicit DegenerateCutError(const std::string& what)
      : Error(ErrorKind::kNumericalFailure, "degenerate cut: " + what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumericalFailure, what) {}
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return 1;
    case ErrorKind::kNumericalFailure:
      return 2;
    case ErrorKind::kVerificationFailure:
      return 3;
  }
  return 1;
}

}  // namespace randproj

#endif  // RANDPROJ_TYPES_H_
