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

// The smooth reformulation F(x) = 1/2 E[dist^2(x, X_S)] and its gradient
// x - E[P_S(x)], evaluated exactly on finite families.

#ifndef RANDPROJ_OBJECTIVE_H_
#define RANDPROJ_OBJECTIVE_H_

#include "randproj/problem.h"

namespace randproj {

struct ObjectiveEval {
  double value = 0.0;       // F(x)
  Vector gradient;          // x - sum_i p_i P_i(x)
  Vector mean_projection;   // sum_i p_i P_i(x)
};

// Throws InvalidInputError for non-finite families.
ObjectiveEval evaluate_objective(const Vector& x, const FeasibilityProblem& p);

double value_F(const Vector& x, const FeasibilityProblem& p);
Vector grad_F(const Vector& x, const FeasibilityProblem& p);

// Mean of 1/2 ||x - P_i(x)||^2 over an already projected minibatch.
double minibatch_F(const Vector& x, const std::vector<Vector>& projections);

}  // namespace randproj

#endif  // RANDPROJ_OBJECTIVE_H_
