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

// On-disk problem description and the desk-scale generators.
//
// Files are JSON. Matrices are stored as {"rows": m, "cols": n, "data": [...]}
// with `data` in row-major order; vectors are plain arrays.

#ifndef RANDPROJ_PROBLEM_FILE_H_
#define RANDPROJ_PROBLEM_FILE_H_

#include <optional>
#include <string>

#include "nlohmann/json.hpp"
#include "randproj/problem.h"
#include "randproj/sampling.h"
#include "randproj/types.h"

namespace randproj {

enum class ProblemKind {
  kLinearEquality,
  kLinearInequality,
  kHalfspaceList,
  kBallIntersection,
  kSplitFeasibility,
  kNormalCone,
  kExample1,
};

std::string to_string(ProblemKind k);
// Throws InvalidInputError for an unknown name.
ProblemKind parse_problem_kind(const std::string& name);

// How S is drawn. Coordinate kinds weight the finite family members; the
// sketch kinds apply to linear-equality and linear-inequality only.
struct DistributionSpec {
  enum class Kind { kUniform, kRowNorm, kWeights, kRowSubset, kAggregate };
  Kind kind = Kind::kUniform;
  Vector weights;         // kWeights
  Eigen::Index block = 1;  // q for kRowSubset, support for kAggregate
};

// Probe S for generated cut families.
enum class ProbeMode {
  kIterate,   // S = current iterate
  kGaussian,  // S = iterate + probe_scale * g
};

struct ProblemFile {
  ProblemKind kind = ProblemKind::kLinearEquality;
  std::string name;
  Eigen::Index dim = 0;

  // Linear kinds and halfspace-list: rows of A with right-hand side b.
  // Split feasibility: the map A with Z below.
  Matrix a;
  Vector b;

  // Ball intersection: one ball per row of `centers`.
  Matrix centers;
  Vector radii;

  // Split feasibility: Z is the ball (z_center, z_radius) when z_radius is
  // set, else the box [z_lower, z_upper].
  Vector z_center;
  std::optional<double> z_radius;
  Vector z_lower;
  Vector z_upper;

  // Normal cone at `anchor`: Omega is the finite point list `omega_points`
  // (one per row) when non-empty, else the ball (omega_center, omega_radius)
  // sampled uniformly.
  Vector anchor;
  Matrix omega_points;
  Vector omega_center;
  double omega_radius = 0.0;

  ProbeMode probe_mode = ProbeMode::kIterate;
  double probe_scale = 1.0;

  // Example 1 power.
  double power = 2.0;

  DistributionSpec distribution;
  std::optional<Vector> x_star;
};

// Throws InvalidInputError on inconsistent dimensions or missing payload.
void validate(const ProblemFile& f);

nlohmann::json to_json(const ProblemFile& f);
// Throws InvalidInputError on malformed input.
ProblemFile problem_from_json(const nlohmann::json& j);

// Throws InvalidInputError when the file cannot be read or parsed.
ProblemFile read_problem_file(const std::string& path);
void write_problem_file(const ProblemFile& f, const std::string& path);

// Gaussian A, planted x*, b = A x*. Rows are scaled to unit norm when
// `normalize_rows` is set.
ProblemFile generate_linear_equality(Eigen::Index m, Eigen::Index n,
                                     RngStream& rng,
                                     bool normalize_rows = false);

// Gaussian A, b = A x* + s with s_i = slack_scale * u_i, u_i ~ U(0, 1].
ProblemFile generate_linear_inequality(Eigen::Index m, Eigen::Index n,
                                       double slack_scale, RngStream& rng);

// m balls containing x* in their interior: centers x* + g_i, radii
// ||g_i|| + margin * u_i with u_i ~ U(0, 1].
ProblemFile generate_ball_intersection(Eigen::Index m, Eigen::Index n,
                                       double margin, RngStream& rng);

// {x : A x in B(A x* + c, r)}, ||c|| < r, with A Gaussian m x n.
ProblemFile generate_split_feasibility(Eigen::Index m, Eigen::Index n,
                                       RngStream& rng);

// Normal cone of the ball B(0, 1) at a random boundary point, Omega sampled
// uniformly from the ball.
ProblemFile generate_normal_cone(Eigen::Index n, RngStream& rng);

// {|x_1|^p <= x_2} and {x_2 = 0}; the intersection is {0}. Throws
// InvalidInputError unless p > 1.
ProblemFile generate_example1(double p);

// The feasibility problem described by the file. Validates first.
FeasibilityProblem build_problem(const ProblemFile& f);

// Sampler behind the linear kinds; nullopt for the other kinds.
std::optional<SketchSampler> sketch_sampler(const ProblemFile& f);

}  // namespace randproj

#endif  // RANDPROJ_PROBLEM_FILE_H_
