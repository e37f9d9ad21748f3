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

#ifndef RANDPROJ_PROBLEM_H_
#define RANDPROJ_PROBLEM_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "randproj/sampling.h"
#include "randproj/sets.h"
#include "randproj/types.h"

namespace randproj {

// Draws one random superset X_S of the target set. The current iterate is
// passed for families whose probe is the iterate itself.
using SetGenerator =
    std::function<ProjectableSet(const Vector& iterate, RngStream& rng)>;

// Description of X used by exact distance oracles.
struct LinearStructure {
  enum class Kind { kEquality, kInequality };
  Kind kind;
  Matrix a;
  Vector b;
};

// Sets drawn for one iteration. Finite families refer to their members by
// index; generated families own the drawn sets.
class Minibatch {
 public:
  Minibatch(const std::vector<ProjectableSet>* family,
            std::vector<Eigen::Index> indices)
      : family_(family), indices_(std::move(indices)) {}
  explicit Minibatch(std::vector<ProjectableSet> drawn)
      : drawn_(std::move(drawn)) {}

  std::size_t size() const {
    return family_ != nullptr ? indices_.size() : drawn_.size();
  }
  const ProjectableSet& operator[](std::size_t i) const {
    return family_ != nullptr
               ? (*family_)[static_cast<std::size_t>(indices_[i])]
               : drawn_[i];
  }
  const std::vector<Eigen::Index>& indices() const { return indices_; }

 private:
  const std::vector<ProjectableSet>* family_ = nullptr;
  std::vector<Eigen::Index> indices_;
  std::vector<ProjectableSet> drawn_;
};

// Find x in the intersection of random supersets X_S, S ~ P.
class FeasibilityProblem {
 public:
  // Finite family with explicit weights. Throws InvalidInputError when the
  // family is empty, dimensions disagree, or the weight count differs.
  FeasibilityProblem(std::vector<ProjectableSet> sets,
                     DiscreteDistribution distribution);

  // Family given only through a sampler of sets.
  FeasibilityProblem(Eigen::Index dim, SetGenerator generator);

  bool is_finite() const { return !generator_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return sets_.size(); }

  // Finite families only.
  const std::vector<ProjectableSet>& sets() const;
  const DiscreteDistribution& distribution() const;

  // Draws all n sets before returning; exactly the rng events of n draws.
  Minibatch draw(const Vector& iterate, int n, RngStream& rng) const;

  // A point known to lie in X. For finite families the containment is checked
  // against every member (tolerance scaled as in `contains`).
  void set_known_feasible(Vector x, double tol = 1e-8);
  const std::optional<Vector>& known_feasible() const { return x_star_; }

  void set_linear_structure(LinearStructure s);
  const std::optional<LinearStructure>& linear_structure() const {
    return linear_;
  }

  // X is the single point given (e.g. {0} for the non-regular fixture).
  void set_solution_point(Vector p) { solution_point_ = std::move(p); }
  const std::optional<Vector>& solution_point() const {
    return solution_point_;
  }

  std::string name;

 private:
  Eigen::Index dim_ = 0;
  std::vector<ProjectableSet> sets_;
  std::optional<DiscreteDistribution> distribution_;
  SetGenerator generator_;
  std::optional<Vector> x_star_;
  std::optional<LinearStructure> linear_;
  std::optional<Vector> solution_point_;
};

// Finite problem whose members are the rows of A x = b (hyperplanes) or
// A x <= b (halfspaces), one set per row.
FeasibilityProblem make_row_problem(const Matrix& a, const Vector& b,
                                    LinearStructure::Kind kind,
                                    DiscreteDistribution dist);

// Finite problem over sketched sets {S^T A x = S^T b} (or <= for aggregates).
// Falls back to a generator when the family is too large to enumerate.
FeasibilityProblem make_sketched_problem(const Matrix& a, const Vector& b,
                                         LinearStructure::Kind kind,
                                         const SketchSampler& sampler,
                                         std::uint64_t enumerate_cap = 100000);

}  // namespace randproj

#endif  // RANDPROJ_PROBLEM_H_
