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

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "Eigen/QR"
#include "randproj/linalg.h"

namespace randproj {

std::string to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::kSolutionPoint: return "solution-point";
    case DistanceMethod::kAffineExact: return "affine-exact";
    case DistanceMethod::kPolyhedralQp: return "polyhedral-qp";
    case DistanceMethod::kSingleSet: return "single-set";
    case DistanceMethod::kDykstra: return "dykstra";
  }
  return "unknown";
}

AffineProjector::AffineProjector(const Matrix& a, const Vector& b)
    : a_(a), b_(b), pinv_(pseudo_inverse(a)) {
  if (a.rows() != b.size()) {
    throw InvalidInputError("affine system: A rows differ from b length");
  }
  const Vector x0 = pinv_ * b_;
  const double resid = (a_ * x0 - b_).norm();
  if (resid > 1e-9 * (1.0 + b_.norm())) {
    throw InvalidInputError("affine system is inconsistent (residual " +
                            std::to_string(resid) + ")");
  }
}

Vector AffineProjector::project(const Vector& x) const {
  if (x.size() != a_.cols()) {
    throw InvalidInputError("affine projection: dimension mismatch");
  }
  return x - pinv_ * (a_ * x - b_);
}

double exact_distance_affine(const Vector& x, const Matrix& a,
                             const Vector& b) {
  const AffineProjector proj(a, b);
  return (x - proj.project(x)).norm();
}

DistanceResult project_polyhedron(const Vector& x, const Matrix& a,
                                  const Vector& b, const Vector& feasible_start,
                                  const QpOptions& options) {
  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();
  if (x.size() != n || feasible_start.size() != n || b.size() != m) {
    throw InvalidInputError("polyhedral projection: dimension mismatch");
  }
  const double scale = 1.0 + x.norm() + feasible_start.norm();
  const Vector start_gap = a * feasible_start - b;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (start_gap(i) > kMembershipTol * (1.0 + a.row(i).norm() * scale)) {
      throw InvalidInputError("polyhedral projection: start point infeasible");
    }
  }

  DistanceResult out;
  out.method = DistanceMethod::kPolyhedralQp;
  Vector y = feasible_start;
  std::vector<Eigen::Index> working;
  std::vector<bool> in_working(static_cast<std::size_t>(m), false);
  const int budget =
      options.max_iterations > 0 ? options.max_iterations
                                 : static_cast<int>(10 * (m + n));
  const double tol = options.tolerance;
  out.converged = false;

  for (int it = 0; it < budget; ++it) {
    const Vector r = x - y;
    Vector d = r;
    Eigen::HouseholderQR<Matrix> qr;
    Matrix active;
    if (!working.empty()) {
      active.resize(n, static_cast<Eigen::Index>(working.size()));
      for (std::size_t j = 0; j < working.size(); ++j) {
        active.col(static_cast<Eigen::Index>(j)) = a.row(working[j]).transpose();
      }
      qr.compute(active);
      const Matrix q = qr.householderQ() * Matrix::Identity(n, active.cols());
      d = r - q * (q.transpose() * r);
    }
    if (d.norm() <= tol * scale) {
      if (working.empty()) {
        out.converged = true;
        break;
      }
      // Multipliers of y - x + A_W^T lambda = 0.
      const Vector lambda = qr.solve(r);
      Eigen::Index j_min = 0;
      const double l_min = lambda.minCoeff(&j_min);
      if (l_min >= -tol * scale) {
        out.converged = true;
        break;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(j_min)])] = false;
      working.erase(working.begin() + j_min);
      continue;
    }
    double t = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double ad = a.row(i).dot(d);
      if (ad <= tol * a.row(i).norm() * d.norm()) continue;
      const double gap = std::max(0.0, b(i) - a.row(i).dot(y));
      const double ti = gap / ad;
      if (ti < t) {
        t = ti;
        blocking = i;
      }
    }
    y += t * d;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_working[static_cast<std::size_t>(blocking)] = true;
    }
  }
  out.projection = y;
  out.distance = (x - y).norm();
  out.residual = std::max(0.0, (a * y - b).maxCoeff());
  return out;
}

namespace {

double max_member_distance(const Vector& y, const FeasibilityProblem& p) {
  double worst = 0.0;
  const auto& sets = p.sets();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (p.distribution().weight(static_cast<Eigen::Index>(i)) == 0.0) continue;
    worst = std::max(worst, distance(y, sets[i]));
  }
  return worst;
}

}  // namespace

DistanceResult reference_distance(const Vector& x, const FeasibilityProblem& p,
                                  const DykstraOptions& options) {
  if (!p.is_finite()) {
    throw InvalidInputError("reference distance needs a finite family");
  }
  if (x.size() != p.dim()) {
    throw InvalidInputError("reference distance: dimension mismatch");
  }
  const auto& sets = p.sets();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (p.distribution().weight(static_cast<Eigen::Index>(i)) > 0.0) {
      active.push_back(i);
    }
  }
  std::vector<Vector> increments(active.size(), Vector::Zero(x.size()));
  Vector y = x;
  DistanceResult out;
  out.method = DistanceMethod::kDykstra;
  out.converged = false;
  const double scale = 1.0 + x.norm();
  for (int cycle = 0; cycle < options.max_cycles; ++cycle) {
    double change = 0.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Vector z = y + increments[j];
      const Vector next = project(z, sets[active[j]]);
      const Vector inc = z - next;
      change += (inc - increments[j]).squaredNorm() + (next - y).squaredNorm();
      increments[j] = inc;
      y = next;
    }
    if (std::sqrt(change) <= options.tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  out.projection = y;
  out.distance = (x - y).norm();
  out.residual = max_member_distance(y, p);
  return out;
}

std::optional<DistanceOracle> make_distance_oracle(
    const FeasibilityProblem& p) {
  if (const auto& point = p.solution_point()) {
    const Vector pt = *point;
    return DistanceOracle([pt](const Vector& x) {
      DistanceResult r;
      r.projection = pt;
      r.distance = (x - pt).norm();
      r.method = DistanceMethod::kSolutionPoint;
      return r;
    });
  }
  if (const auto& lin = p.linear_structure()) {
    if (lin->kind == LinearStructure::Kind::kEquality) {
      auto proj = std::make_shared<AffineProjector>(lin->a, lin->b);
      return DistanceOracle([proj](const Vector& x) {
        DistanceResult r;
        r.projection = proj->project(x);
        r.distance = (x - r.projection).norm();
        r.method = DistanceMethod::kAffineExact;
        return r;
      });
    }
    if (const auto& start = p.known_feasible()) {
      const Matrix a = lin->a;
      const Vector b = lin->b;
      const Vector s = *start;
      return DistanceOracle([a, b, s](const Vector& x) {
        return project_polyhedron(x, a, b, s);
      });
    }
  }
  if (!p.is_finite()) return std::nullopt;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.distribution().weight(static_cast<Eigen::Index>(i)) > 0.0) {
      active.push_back(i);
    }
  }
  if (active.size() == 1) {
    const ProjectableSet only = p.sets()[active.front()];
    return DistanceOracle([only](const Vector& x) {
      DistanceResult r;
      r.projection = project(x, only);
      r.distance = (x - r.projection).norm();
      r.method = DistanceMethod::kSingleSet;
      return r;
    });
  }
  // The oracle copies the problem so it stays valid on its own.
  auto owned = std::make_shared<FeasibilityProblem>(p);
  return DistanceOracle(
      [owned](const Vector& x) { return reference_distance(x, *owned); });
}

}  // namespace randproj
