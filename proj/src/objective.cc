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

#include "randproj/objective.h"

namespace randproj {

ObjectiveEval evaluate_objective(const Vector& x, const FeasibilityProblem& p) {
  const auto& sets = p.sets();
  const auto& dist = p.distribution();
  ObjectiveEval out;
  out.mean_projection = Vector::Zero(x.size());
  out.gradient = Vector::Zero(x.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const double w = dist.weight(static_cast<Eigen::Index>(i));
    if (w == 0.0) continue;
    const Vector proj = project(x, sets[i]);
    const Vector r = x - proj;
    out.value += 0.5 * w * r.squaredNorm();
    out.gradient += w * r;
    out.mean_projection += w * proj;
  }
  return out;
}

double value_F(const Vector& x, const FeasibilityProblem& p) {
  return evaluate_objective(x, p).value;
}

Vector grad_F(const Vector& x, const FeasibilityProblem& p) {
  return evaluate_objective(x, p).gradient;
}

double minibatch_F(const Vector& x, const std::vector<Vector>& projections) {
  if (projections.empty()) return 0.0;
  double acc = 0.0;
  for (const Vector& proj : projections) acc += (x - proj).squaredNorm();
  return 0.5 * acc / static_cast<double>(projections.size());
}

}  // namespace randproj
