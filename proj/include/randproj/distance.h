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

// Distances to the target intersection X, used by theorem checks and traces.

#ifndef RANDPROJ_DISTANCE_H_
#define RANDPROJ_DISTANCE_H_

#include <functional>
#include <optional>
#include <string>

#include "randproj/problem.h"
#include "randproj/types.h"

namespace randproj {

enum class DistanceMethod {
  kSolutionPoint,  // X is a single known point
  kAffineExact,    // pseudoinverse formula for {Ax = b}
  kPolyhedralQp,   // active-set projection onto {Ax <= b}
  kSingleSet,      // closed-form projection onto the only member
  kDykstra,        // iterative projection onto a finite intersection
};

std::string to_string(DistanceMethod m);

struct DistanceResult {
  double distance = 0.0;
  Vector projection;  // approximate P_X(x)
  DistanceMethod method = DistanceMethod::kAffineExact;
  bool converged = true;
  // Max distance from `projection` to a member set (0 for exact methods).
  double residual = 0.0;
};

// ||A^+ (Ax - b)||. Throws InvalidInputError when b is not in range(A).
double exact_distance_affine(const Vector& x, const Matrix& a, const Vector& b);

// Caches A^+ and the consistency check across calls.
class AffineProjector {
 public:
  AffineProjector(const Matrix& a, const Vector& b);
  Vector project(const Vector& x) const;

 private:
  Matrix a_;
  Vector b_;
  Matrix pinv_;
};

struct QpOptions {
  int max_iterations = 0;  // 0 selects 10 * (rows + cols)
  double tolerance = 1e-12;
};

// Projection onto {y : A y <= b} by a primal active-set method started at a
// feasible point. Throws InvalidInputError if `feasible_start` violates a row
// by more than the membership tolerance.
DistanceResult project_polyhedron(const Vector& x, const Matrix& a,
                                  const Vector& b, const Vector& feasible_start,
                                  const QpOptions& options = {});

struct DykstraOptions {
  int max_cycles = 200000;
  double tolerance = 1e-13;
};

// Dykstra's alternating scheme over the positive-weight members of a finite
// family. Converges to P_X(x) for any closed convex sets with nonempty
// intersection; `converged` is false when the budget runs out.
DistanceResult reference_distance(const Vector& x, const FeasibilityProblem& p,
                                  const DykstraOptions& options = {});

using DistanceOracle = std::function<DistanceResult(const Vector&)>;

// Most accurate oracle available for the problem: solution point, affine
// formula, polyhedral QP (needs a known feasible point), single set, Dykstra.
// Returns nullopt for generated families without linear structure.
std::optional<DistanceOracle> make_distance_oracle(const FeasibilityProblem& p);

}  // namespace randproj

#endif  // RANDPROJ_DISTANCE_H_
