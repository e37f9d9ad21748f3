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

#include "randproj/distance.h"

#include <cmath>
#include <limits>
#include <vector>

#include "Eigen/LU"
#include "gtest/gtest.h"

namespace randproj {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Brute-force projection onto a planar polygon {Ay <= b}: the nearest
// feasible candidate among x itself, the projections onto each edge line and
// every pairwise vertex.
Vector enumerate_planar_projection(const Vector& x, const Matrix& a,
                                   const Vector& b) {
  auto feasible = [&](const Vector& y) {
    return ((a * y - b).array() <= 1e-10).all();
  };
  std::vector<Vector> candidates = {x};
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vector ai = a.row(i).transpose();
    candidates.push_back(x - (ai.dot(x) - b(i)) / ai.squaredNorm() * ai);
    for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
      Matrix m(2, 2);
      m.row(0) = a.row(i);
      m.row(1) = a.row(j);
      if (std::abs(m.determinant()) < 1e-12) continue;
      candidates.push_back(m.inverse() * vec2(b(i), b(j)));
    }
  }
  Vector best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Vector& c : candidates) {
    if (!feasible(c)) continue;
    const double d = (c - x).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

FeasibilityProblem halfspace_problem(const Matrix& a, const Vector& b) {
  return make_row_problem(a, b, LinearStructure::Kind::kInequality,
                          uniform_weights(a.rows()));
}

TEST(ExactDistanceAffineTest, Examples) {
  Matrix a(1, 2);
  a << 1, 0;
  Vector b(1);
  b << 1;
  EXPECT_NEAR(exact_distance_affine(vec2(3, 4), a, b), 2.0, 1e-15);
  EXPECT_NEAR(exact_distance_affine(vec2(1, -7), a, b), 0.0, 1e-15);
}

TEST(ExactDistanceAffineTest, InconsistentSystemThrows) {
  Matrix a(2, 2);
  a << 1, 0, 1, 0;
  EXPECT_THROW(exact_distance_affine(vec2(0, 0), a, vec2(1, 2)),
               InvalidInputError);
}

TEST(ExactDistanceAffineTest, MatchesDykstraReference) {
  RngStream rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a(5, 8);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Vector xs = rng.normal_vector(8);
    const Vector b = a * xs;
    const FeasibilityProblem p = make_row_problem(
        a, b, LinearStructure::Kind::kEquality, uniform_weights(5));
    const Vector x = rng.normal_vector(8) * 3.0;
    const DistanceResult ref = reference_distance(x, p);
    EXPECT_TRUE(ref.converged);
    EXPECT_NEAR(ref.distance, exact_distance_affine(x, a, b), 1e-8);
  }
}

TEST(ReferenceDistanceTest, SingleBallClosedForm) {
  const Ball ball(vec2(1, 1), 0.5);
  FeasibilityProblem p({ball}, uniform_weights(1));
  const Vector x = vec2(4, 5);
  const DistanceResult r = reference_distance(x, p);
  EXPECT_NEAR(r.distance, 5.0 - 0.5, 1e-12);
  const auto oracle = make_distance_oracle(p);
  ASSERT_TRUE(oracle.has_value());
  EXPECT_EQ((*oracle)(x).method, DistanceMethod::kSingleSet);
  EXPECT_NEAR((*oracle)(x).distance, 4.5, 1e-14);
}

TEST(ReferenceDistanceTest, TwoBallLensAgainstGeometry) {
  // Balls of radius 1 centered at (+-0.5, 0); the lens tip nearest to (0, 3)
  // is (0, sqrt(0.75)).
  FeasibilityProblem p({Ball(vec2(-0.5, 0), 1.0), Ball(vec2(0.5, 0), 1.0)},
                       uniform_weights(2));
  const DistanceResult r = reference_distance(vec2(0, 3), p);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.distance, 3.0 - std::sqrt(0.75), 1e-8);
}

TEST(PolyhedralProjectionTest, MatchesPlanarEnumerationOracle) {
  RngStream rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(trial % 5);
    Matrix a(m, 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Vector xs = rng.normal_vector(2);
    Vector slack(m);
    for (Eigen::Index i = 0; i < m; ++i) slack(i) = rng.uniform();
    const Vector b = a * xs + slack;
    const Vector x = rng.normal_vector(2) * 4.0;
    const DistanceResult qp = project_polyhedron(x, a, b, xs);
    ASSERT_TRUE(qp.converged);
    const Vector oracle = enumerate_planar_projection(x, a, b);
    EXPECT_NEAR((qp.projection - oracle).norm(), 0.0, 1e-9) << "trial " << trial;
    EXPECT_LE(qp.residual, 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(PolyhedralProjectionTest, AgreesWithDykstraInHigherDimension) {
  RngStream rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a(30, 10);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Vector xs = rng.normal_vector(10);
    Vector slack(30);
    for (Eigen::Index i = 0; i < 30; ++i) slack(i) = rng.uniform();
    const Vector b = a * xs + slack;
    const Vector x = xs + rng.normal_vector(10) * 2.0;
    const DistanceResult qp = project_polyhedron(x, a, b, xs);
    ASSERT_TRUE(qp.converged);
    const DistanceResult dk = reference_distance(x, halfspace_problem(a, b));
    EXPECT_NEAR(qp.distance, dk.distance, 1e-7);
  }
}

TEST(PolyhedralProjectionTest, FeasiblePointIsItsOwnProjection) {
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  const DistanceResult r =
      project_polyhedron(vec2(-1, -2), a, vec2(0, 0), vec2(-5, -5));
  EXPECT_NEAR(r.distance, 0.0, 1e-14);
  EXPECT_THROW(project_polyhedron(vec2(0, 0), a, vec2(0, 0), vec2(1, 1)),
               InvalidInputError);
}

TEST(DistanceOracleTest, PrecedenceTags) {
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  const Vector b = vec2(1, 1);
  const FeasibilityProblem eq = make_row_problem(
      a, b, LinearStructure::Kind::kEquality, uniform_weights(2));
  EXPECT_EQ((*make_distance_oracle(eq))(vec2(0, 0)).method,
            DistanceMethod::kAffineExact);

  FeasibilityProblem ineq = halfspace_problem(a, b);
  EXPECT_EQ((*make_distance_oracle(ineq))(vec2(3, 3)).method,
            DistanceMethod::kDykstra);
  ineq.set_known_feasible(vec2(0, 0));
  const DistanceResult r = (*make_distance_oracle(ineq))(vec2(3, 3));
  EXPECT_EQ(r.method, DistanceMethod::kPolyhedralQp);
  EXPECT_NEAR(r.distance, std::sqrt(8.0), 1e-14);

  FeasibilityProblem point({PowerEpigraph(2.0), Hyperplane(vec2(0, 1), 0.0)},
                           uniform_weights(2));
  point.set_solution_point(vec2(0, 0));
  EXPECT_EQ((*make_distance_oracle(point))(vec2(3, 4)).distance, 5.0);

  const FeasibilityProblem gen(2, [](const Vector&, RngStream&) {
    return ProjectableSet(WholeSpace{2});
  });
  EXPECT_FALSE(make_distance_oracle(gen).has_value());
}

}  // namespace
}  // namespace randproj
