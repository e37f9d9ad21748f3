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

#include "randproj/sets.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "randproj/linalg.h"

namespace randproj {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidSetError(std::string(what) + " not finite");
}

double checked_normal(const Vector& normal, const char* what) {
  require_finite(normal, what);
  const double sq = normal.squaredNorm();
  if (!(std::sqrt(sq) > kEps)) {
    throw InvalidSetError(std::string(what) + " has zero normal");
  }
  return sq;
}

void require_dims(const Vector& x, Eigen::Index dim) {
  if (x.size() != dim) {
    std::ostringstream os;
    os << "point dimension " << x.size() << " does not match set dimension "
       << dim;
    throw InvalidInputError(os.str());
  }
}

// True when v is numerically zero relative to the data that produced it.
bool negligible(double norm, double scale, Eigen::Index size) {
  return norm <= rank_cutoff(size, 1, scale);
}

}  // namespace

Hyperplane::Hyperplane(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  normal_sq_ = checked_normal(normal_, "hyperplane");
  if (!std::isfinite(offset_)) throw InvalidSetError("hyperplane offset");
}

Halfspace::Halfspace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  normal_sq_ = checked_normal(normal_, "halfspace");
  if (!std::isfinite(offset_)) throw InvalidSetError("halfspace offset");
}

SketchedEqualitySet::SketchedEqualitySet(const Matrix& a, const Vector& b,
                                         const Matrix& sketch) {
  if (a.rows() != b.size() || sketch.rows() != a.rows() || sketch.cols() < 1) {
    throw InvalidSetError("sketched equality dimensions");
  }
  at_s_ = a.transpose() * sketch;
  st_b_ = sketch.transpose() * b;
  if (negligible(at_s_.norm(), a.norm() * sketch.norm(), a.size())) {
    throw InvalidSetError("S^T A = 0 (whole space)");
  }
  gram_pinv_ = pseudo_inverse(at_s_.transpose() * at_s_);
}

SketchedHalfspace::SketchedHalfspace(const Matrix& a, const Vector& b,
                                     const Vector& sketch) {
  if (a.rows() != b.size() || sketch.size() != a.rows()) {
    throw InvalidSetError("sketched halfspace dimensions");
  }
  if ((sketch.array() < 0.0).any()) {
    throw InvalidSetError("sketch has a negative entry");
  }
  normal_ = a.transpose() * sketch;
  offset_ = sketch.dot(b);
  degenerate_ = negligible(normal_.norm(), a.norm() * sketch.norm(), a.size());
}

Ball::Ball(Vector center, double radius)
    : center_(std::move(center)), radius_(radius) {
  require_finite(center_, "ball center");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw InvalidSetError("ball radius must be positive");
  }
}

Box::Box(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw InvalidSetError("box dimensions");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_(i)) || std::isnan(upper_(i)) ||
        lower_(i) > upper_(i)) {
      throw InvalidSetError("box bounds must satisfy lower <= upper");
    }
  }
}

Box Box::nonnegative_orthant(Eigen::Index dim) {
  return Box(Vector::Zero(dim),
             Vector::Constant(dim, std::numeric_limits<double>::infinity()));
}

PowerEpigraph::PowerEpigraph(double power) : power_(power) {
  if (!(power_ > 1.0) || !std::isfinite(power_)) {
    throw InvalidSetError("power epigraph needs p > 1");
  }
}

Vector project_hyperplane(const Vector& x, const Hyperplane& h) {
  require_dims(x, h.normal().size());
  const double residual = h.normal().dot(x) - h.offset();
  return x - (residual / h.normal_squared_norm()) * h.normal();
}

Vector project_halfspace(const Vector& x, const Halfspace& h) {
  require_dims(x, h.normal().size());
  const double residual = h.normal().dot(x) - h.offset();
  if (residual <= 0.0) return x;
  return x - (residual / h.normal_squared_norm()) * h.normal();
}

Vector project_sketched_equality(const Vector& x,
                                 const SketchedEqualitySet& e) {
  require_dims(x, e.sketched_rows().rows());
  const Vector residual = e.sketched_rows().transpose() * x - e.sketched_rhs();
  return x - e.sketched_rows() * (e.gram_pinv() * residual);
}

Vector project_sketched_halfspace(const Vector& x, const SketchedHalfspace& s) {
  require_dims(x, s.aggregate_normal().size());
  if (s.is_degenerate()) {
    if (s.aggregate_offset() < 0.0) {
      throw InfeasibleAggregateError("S^T A = 0 with S^T b < 0");
    }
    return x;
  }
  const double residual = s.aggregate_normal().dot(x) - s.aggregate_offset();
  if (residual <= 0.0) return x;
  return x - (residual / s.aggregate_normal().squaredNorm()) *
                 s.aggregate_normal();
}

Vector project_ball(const Vector& x, const Ball& b) {
  require_dims(x, b.center().size());
  const Vector d = x - b.center();
  const double r = d.norm();
  if (r <= b.radius()) return x;
  return b.center() + (b.radius() / r) * d;
}

Vector project_box(const Vector& x, const Box& b) {
  require_dims(x, b.lower().size());
  return x.cwiseMax(b.lower()).cwiseMin(b.upper());
}

Vector project_power_epigraph(const Vector& x, const PowerEpigraph& e) {
  require_dims(x, 2);
  const double p = e.power();
  const double u = std::abs(x(0));
  const double v = x(1);
  if (std::pow(u, p) <= v) return x;
  // Boundary point (t, t^p), t in [0, u]. With lambda = t^p - v >= 0 the
  // optimality condition is h(t) = t - u + (t^p - v) p t^(p-1) = 0; h is
  // increasing wherever t^p >= v, so bracket from t0 = v_+^(1/p).
  auto h = [&](double t) {
    return t - u + (std::pow(t, p) - v) * p * std::pow(t, p - 1.0);
  };
  double lo = v > 0.0 ? std::pow(v, 1.0 / p) : 0.0;
  double hi = u;
  lo = std::min(lo, hi);
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double t = std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
  Vector out(2);
  out(0) = std::copysign(t, x(0));
  out(1) = std::pow(t, p);
  return out;
}

Vector project(const Vector& x, const ProjectableSet& set) {
  return std::visit(
      Overloaded{
          [&](const WholeSpace& w) -> Vector {
            if (w.dim != 0) require_dims(x, w.dim);
            return x;
          },
          [&](const Hyperplane& s) { return project_hyperplane(x, s); },
          [&](const Halfspace& s) { return project_halfspace(x, s); },
          [&](const SketchedEqualitySet& s) {
            return project_sketched_equality(x, s);
          },
          [&](const SketchedHalfspace& s) {
            return project_sketched_halfspace(x, s);
          },
          [&](const Ball& s) { return project_ball(x, s); },
          [&](const Box& s) { return project_box(x, s); },
          [&](const PowerEpigraph& s) { return project_power_epigraph(x, s); },
      },
      set);
}

double distance(const Vector& x, const ProjectableSet& set) {
  return (x - project(x, set)).norm();
}

bool contains(const ProjectableSet& set, const Vector& x, double tol) {
  return distance(x, set) <= tol * (1.0 + x.norm());
}

Eigen::Index dimension(const ProjectableSet& set) {
  return std::visit(
      Overloaded{
          [](const WholeSpace& s) { return s.dim; },
          [](const Hyperplane& s) { return s.normal().size(); },
          [](const Halfspace& s) { return s.normal().size(); },
          [](const SketchedEqualitySet& s) { return s.sketched_rows().rows(); },
          [](const SketchedHalfspace& s) { return s.aggregate_normal().size(); },
          [](const Ball& s) { return s.center().size(); },
          [](const Box& s) { return s.lower().size(); },
          [](const PowerEpigraph&) { return Eigen::Index{2}; },
      },
      set);
}

std::string describe(const ProjectableSet& set) {
  std::ostringstream os;
  std::visit(
      Overloaded{
          [&](const WholeSpace& s) { os << "whole-space(" << s.dim << ")"; },
          [&](const Hyperplane& s) {
            os << "hyperplane(n=" << s.normal().size() << ")";
          },
          [&](const Halfspace& s) {
            os << "halfspace(n=" << s.normal().size() << ")";
          },
          [&](const SketchedEqualitySet& s) {
            os << "sketched-equality(n=" << s.sketched_rows().rows()
               << ", q=" << s.sketched_rows().cols() << ")";
          },
          [&](const SketchedHalfspace& s) {
            os << "sketched-halfspace(n=" << s.aggregate_normal().size()
               << ")";
          },
          [&](const Ball& s) {
            os << "ball(n=" << s.center().size() << ", r=" << s.radius()
               << ")";
          },
          [&](const Box& s) { os << "box(n=" << s.lower().size() << ")"; },
          [&](const PowerEpigraph& s) {
            os << "power-epigraph(p=" << s.power() << ")";
          },
      },
      set);
  return os.str();
}

ProjectableSet make_sketched_equality(const Matrix& a, const Vector& b,
                                      const Matrix& sketch) {
  if (a.rows() != b.size() || sketch.rows() != a.rows()) {
    throw InvalidSetError("sketched equality dimensions");
  }
  const Matrix at_s = a.transpose() * sketch;
  if (negligible(at_s.norm(), a.norm() * sketch.norm(), a.size())) {
    const Vector st_b = sketch.transpose() * b;
    if (!negligible(st_b.norm(), b.norm() * sketch.norm(), b.size())) {
      throw InfeasibleAggregateError("S^T A = 0 with S^T b != 0");
    }
    return WholeSpace{a.cols()};
  }
  return SketchedEqualitySet(a, b, sketch);
}

ProjectableSet make_sketched_halfspace(const Matrix& a, const Vector& b,
                                       const Vector& sketch) {
  SketchedHalfspace s(a, b, sketch);
  if (s.is_degenerate()) {
    if (s.aggregate_offset() < 0.0) {
      throw InfeasibleAggregateError("A^T S = 0 with S^T b < 0");
    }
    return WholeSpace{a.cols()};
  }
  return s;
}

ProjectableSet to_set(const Cut& cut) {
  return std::visit([](const auto& c) -> ProjectableSet { return c; }, cut);
}

SeparationOracleSet separation_oracle_for(ProjectableSet set, double tol) {
  SeparationOracleSet oracle;
  oracle.dim = dimension(set);
  oracle.is_member = [set, tol](const Vector& s) {
    return contains(set, s, tol);
  };
  oracle.separating_vector = [set](const Vector& s) -> Vector {
    return s - project(s, set);
  };
  return oracle;
}

Cut separation_cut(const Vector& s, const SeparationOracleSet& oracle) {
  if (oracle.dim != 0) require_dims(s, oracle.dim);
  if (oracle.is_member(s)) return WholeSpace{s.size()};
  const Vector g = oracle.separating_vector(s);
  if (g.size() != s.size()) {
    throw InvalidInputError("separating vector has wrong dimension");
  }
  if (!(g.norm() > 0.0)) {
    throw DegenerateCutError("oracle returned g = 0 for a non-member");
  }
  return Halfspace(g, g.dot(s));
}

Vector project_simple(const Vector& y, const SimpleSet& z) {
  return std::visit(
      Overloaded{[&](const Ball& b) { return project_ball(y, b); },
                 [&](const Box& b) { return project_box(y, b); }},
      z);
}

Cut supporting_halfspace(const Vector& s, const SplitFeasibilityFamily& f,
                         double tol) {
  if (s.size() != f.a.cols()) {
    throw InvalidInputError("probe dimension does not match A");
  }
  const Vector as = f.a * s;
  const Vector pz = project_simple(as, f.z);
  const Vector gap = as - pz;
  if (gap.norm() <= tol * (1.0 + as.norm())) return WholeSpace{s.size()};
  Vector normal = f.a.transpose() * gap;
  if (negligible(normal.norm(), f.a.norm() * gap.norm(), f.a.size())) {
    throw DegenerateCutError("c_S = 0 while As is outside Z");
  }
  // b_S = ||As||^2 - P^T As - ||As - P||^2, which simplifies to gap^T P.
  const double offset = gap.dot(pz);
  return Halfspace(std::move(normal), offset);
}

Cut normal_cone_cut(const Vector& sample, const NormalConeFamily& f) {
  if (sample.size() != f.anchor.size()) {
    throw InvalidInputError("sample dimension does not match anchor");
  }
  Vector normal = sample - f.anchor;
  if (!(normal.norm() > 0.0)) return WholeSpace{sample.size()};
  const double offset = normal.dot(f.anchor);
  return Halfspace(std::move(normal), offset);
}

}  // namespace randproj
