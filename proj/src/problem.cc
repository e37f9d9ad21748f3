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

#include "randproj/problem.h"

#include <utility>

namespace randproj {

FeasibilityProblem::FeasibilityProblem(std::vector<ProjectableSet> sets,
                                       DiscreteDistribution distribution)
    : sets_(std::move(sets)), distribution_(std::move(distribution)) {
  if (sets_.empty()) throw InvalidInputError("problem needs at least one set");
  if (static_cast<Eigen::Index>(sets_.size()) != distribution_->size()) {
    throw InvalidInputError("distribution length does not match set count");
  }
  for (const ProjectableSet& s : sets_) {
    const Eigen::Index d = dimension(s);
    if (d == 0) continue;
    if (dim_ == 0) dim_ = d;
    if (d != dim_) throw InvalidInputError("sets disagree on dimension");
  }
  if (dim_ == 0) throw InvalidInputError("problem dimension is unknown");
}

FeasibilityProblem::FeasibilityProblem(Eigen::Index dim, SetGenerator generator)
    : dim_(dim), generator_(std::move(generator)) {
  if (dim_ < 1) throw InvalidInputError("problem dimension must be >= 1");
  if (!generator_) throw InvalidInputError("set generator is empty");
}

const std::vector<ProjectableSet>& FeasibilityProblem::sets() const {
  if (!is_finite()) throw InvalidInputError("problem family is not finite");
  return sets_;
}

const DiscreteDistribution& FeasibilityProblem::distribution() const {
  if (!is_finite()) throw InvalidInputError("problem family is not finite");
  return *distribution_;
}

Minibatch FeasibilityProblem::draw(const Vector& iterate, int n,
                                   RngStream& rng) const {
  if (is_finite()) {
    return Minibatch(&sets_, sample_minibatch(*distribution_, n, rng));
  }
  if (n < 1) throw InvalidInputError("minibatch size must be >= 1");
  std::vector<ProjectableSet> drawn;
  drawn.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) drawn.push_back(generator_(iterate, rng));
  return Minibatch(std::move(drawn));
}

void FeasibilityProblem::set_known_feasible(Vector x, double tol) {
  if (x.size() != dim_) {
    throw InvalidInputError("known feasible point has wrong dimension");
  }
  if (is_finite()) {
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (!contains(sets_[i], x, tol)) {
        throw InvalidInputError("known feasible point violates set " +
                                std::to_string(i));
      }
    }
  }
  x_star_ = std::move(x);
}

void FeasibilityProblem::set_linear_structure(LinearStructure s) {
  if (s.a.cols() != dim_ || s.a.rows() != s.b.size()) {
    throw InvalidInputError("linear structure dimensions");
  }
  linear_ = std::move(s);
}

FeasibilityProblem make_row_problem(const Matrix& a, const Vector& b,
                                    LinearStructure::Kind kind,
                                    DiscreteDistribution dist) {
  if (a.rows() != b.size() || a.rows() != dist.size()) {
    throw InvalidInputError("row problem dimensions");
  }
  std::vector<ProjectableSet> sets;
  sets.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Vector row = a.row(i).transpose();
    if (kind == LinearStructure::Kind::kEquality) {
      sets.emplace_back(Hyperplane(std::move(row), b(i)));
    } else {
      sets.emplace_back(Halfspace(std::move(row), b(i)));
    }
  }
  FeasibilityProblem p(std::move(sets), std::move(dist));
  p.set_linear_structure({kind, a, b});
  return p;
}

FeasibilityProblem make_sketched_problem(const Matrix& a, const Vector& b,
                                         LinearStructure::Kind kind,
                                         const SketchSampler& sampler,
                                         std::uint64_t enumerate_cap) {
  if (sampler.rows() != a.rows()) {
    throw InvalidInputError("sketch rows do not match the system");
  }
  if (kind == LinearStructure::Kind::kInequality && sampler.block() > 1 &&
      sampler.mode() != SketchSampler::Mode::kAggregate) {
    // An intersection of several halfspaces has no closed-form projection.
    throw InvalidInputError(
        "inequality sketches must be single columns (q = 1)");
  }
  if (sampler.mode() == SketchSampler::Mode::kCoordinate) {
    return make_row_problem(a, b, kind, *sampler.distribution());
  }
  auto build = [a, b, kind](const Matrix& s) -> ProjectableSet {
    if (kind == LinearStructure::Kind::kEquality) {
      return make_sketched_equality(a, b, s);
    }
    return make_sketched_halfspace(a, b, s.col(0));
  };
  if (auto members = sampler.enumerate(enumerate_cap)) {
    std::vector<ProjectableSet> sets;
    Vector w(static_cast<Eigen::Index>(members->size()));
    for (std::size_t i = 0; i < members->size(); ++i) {
      sets.push_back(build((*members)[i].sketch));
      w(static_cast<Eigen::Index>(i)) = (*members)[i].weight;
    }
    FeasibilityProblem p(std::move(sets), normalized_weights(w));
    p.set_linear_structure({kind, a, b});
    return p;
  }
  FeasibilityProblem p(a.cols(),
                       [sampler, build](const Vector&, RngStream& rng) {
                         return build(sampler.draw(rng));
                       });
  p.set_linear_structure({kind, a, b});
  return p;
}

}  // namespace randproj
