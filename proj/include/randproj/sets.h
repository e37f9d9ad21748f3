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

// Closed convex sets with exact Euclidean projection oracles.
//
// Every set type is immutable after construction; projection is a pure
// function of (point, set), so sets may be shared across threads freely.
// ProjectableSet is the closed variant used by problems and solvers.

#ifndef RANDPROJ_SETS_H_
#define RANDPROJ_SETS_H_

#include <functional>
#include <string>
#include <variant>

#include "randproj/types.h"

namespace randproj {

// R^n. Produced by sketches and cuts that carry no information.
struct WholeSpace {
  Eigen::Index dim = 0;
};

// {x : a^T x = b}
class Hyperplane {
 public:
  Hyperplane(Vector normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  double normal_squared_norm() const { return normal_sq_; }

 private:
  Vector normal_;
  double offset_;
  double normal_sq_;
};

// {x : a^T x <= b}
class Halfspace {
 public:
  Halfspace(Vector normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  double normal_squared_norm() const { return normal_sq_; }

 private:
  Vector normal_;
  double offset_;
  double normal_sq_;
};

// {x : S^T A x = S^T b} for an m x q sketch S. Only the reduced data
// (A^T S, S^T b) and the pseudoinverse of the q x q Gram matrix S^T A A^T S
// are kept.
class SketchedEqualitySet {
 public:
  // Throws InvalidSetError on dimension mismatch or when S^T A = 0 (use
  // make_sketched_equality to get WholeSpace for that case).
  SketchedEqualitySet(const Matrix& a, const Vector& b, const Matrix& sketch);

  const Matrix& sketched_rows() const { return at_s_; }  // A^T S, n x q
  const Vector& sketched_rhs() const { return st_b_; }   // S^T b
  const Matrix& gram_pinv() const { return gram_pinv_; }

 private:
  Matrix at_s_;
  Vector st_b_;
  Matrix gram_pinv_;
};

// {x : S^T A x <= S^T b} for a nonnegative aggregation vector S.
class SketchedHalfspace {
 public:
  // Throws InvalidSetError on dimension mismatch or a negative entry in S.
  // A zero aggregate A^T S is accepted; projection then either returns x or
  // throws InfeasibleAggregateError.
  SketchedHalfspace(const Matrix& a, const Vector& b, const Vector& sketch);

  const Vector& aggregate_normal() const { return normal_; }  // A^T S
  double aggregate_offset() const { return offset_; }         // S^T b
  bool is_degenerate() const { return degenerate_; }

 private:
  Vector normal_;
  double offset_;
  bool degenerate_;
};

// {x : ||x - center|| <= radius}
class Ball {
 public:
  Ball(Vector center, double radius);

  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vector center_;
  double radius_;
};

// {x : lower <= x <= upper}; entries may be +-infinity.
class Box {
 public:
  Box(Vector lower, Vector upper);

  static Box nonnegative_orthant(Eigen::Index dim);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  Vector lower_;
  Vector upper_;
};

// {x in R^2 : |x_1|^p <= x_2}, p > 1. Projection by bracketed 1-D root solve
// of the boundary optimality condition.
class PowerEpigraph {
 public:
  explicit PowerEpigraph(double power);

  double power() const { return power_; }

 private:
  double power_;
};

using ProjectableSet =
    std::variant<WholeSpace, Hyperplane, Halfspace, SketchedEqualitySet,
                 SketchedHalfspace, Ball, Box, PowerEpigraph>;

Vector project_hyperplane(const Vector& x, const Hyperplane& h);
Vector project_halfspace(const Vector& x, const Halfspace& h);
Vector project_sketched_equality(const Vector& x, const SketchedEqualitySet& e);
Vector project_sketched_halfspace(const Vector& x, const SketchedHalfspace& s);
Vector project_ball(const Vector& x, const Ball& b);
Vector project_box(const Vector& x, const Box& b);
Vector project_power_epigraph(const Vector& x, const PowerEpigraph& e);

Vector project(const Vector& x, const ProjectableSet& set);

// Euclidean distance from x to the set.
double distance(const Vector& x, const ProjectableSet& set);

// Scale-relative membership: dist(x, set) <= tol * (1 + ||x||).
bool contains(const ProjectableSet& set, const Vector& x,
              double tol = kMembershipTol);

// Ambient dimension; 0 for a WholeSpace built without one.
Eigen::Index dimension(const ProjectableSet& set);

std::string describe(const ProjectableSet& set);

// Returns WholeSpace when S^T A = 0 and S^T b = 0; throws
// InfeasibleAggregateError when S^T A = 0 but S^T b != 0.
ProjectableSet make_sketched_equality(const Matrix& a, const Vector& b,
                                      const Matrix& sketch);

// Returns WholeSpace when A^T S = 0 and S^T b >= 0; throws
// InfeasibleAggregateError when A^T S = 0 and S^T b < 0.
ProjectableSet make_sketched_halfspace(const Matrix& a, const Vector& b,
                                       const Vector& sketch);

// ---------------------------------------------------------------------------
// Cuts for families described implicitly by an oracle.

using Cut = std::variant<WholeSpace, Halfspace>;

ProjectableSet to_set(const Cut& cut);

// Membership test plus a callback g(s) with <g, z - s> <= 0 for every z in X.
struct SeparationOracleSet {
  Eigen::Index dim = 0;
  std::function<bool(const Vector&)> is_member;
  std::function<Vector(const Vector&)> separating_vector;
};

// Wraps a projectable set: member test via `contains`, g(s) = s - P(s).
SeparationOracleSet separation_oracle_for(ProjectableSet set,
                                          double tol = kMembershipTol);

// WholeSpace if s is a member, else {x : <g, x - s> <= 0}.
Cut separation_cut(const Vector& s, const SeparationOracleSet& oracle);

// Z for split feasibility; both choices have closed-form projections.
using SimpleSet = std::variant<Ball, Box>;

// X = {x : A x in Z}.
struct SplitFeasibilityFamily {
  Matrix a;
  SimpleSet z;
};

Vector project_simple(const Vector& y, const SimpleSet& z);

// Supporting halfspace at probe s: WholeSpace if A s in Z, otherwise
// {x : c^T x <= b} with c = A^T (As - P(As)), b = (As - P(As))^T P(As).
Cut supporting_halfspace(const Vector& s, const SplitFeasibilityFamily& f,
                         double tol = kMembershipTol);

// Normal cone at anchor x_bar of a base set Omega; each sample S in Omega
// yields {x : (x - x_bar)^T (S - x_bar) <= 0}.
struct NormalConeFamily {
  Vector anchor;
};

Cut normal_cone_cut(const Vector& sample, const NormalConeFamily& f);

}  // namespace randproj

#endif  // RANDPROJ_SETS_H_
