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


#include "randproj/problem_file.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace randproj {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "randproj-problem";
constexpr int kFormatVersion = 1;

struct KindName {
  ProblemKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ProblemKind::kLinearEquality, "linear-equality"},
    {ProblemKind::kLinearInequality, "linear-inequality"},
    {ProblemKind::kHalfspaceList, "halfspace-list"},
    {ProblemKind::kBallIntersection, "ball-intersection"},
    {ProblemKind::kSplitFeasibility, "split-feasibility"},
    {ProblemKind::kNormalCone, "normal-cone"},
    {ProblemKind::kExample1, "pathological-example-1"},
};

struct DistName {
  DistributionSpec::Kind kind;
  const char* name;
};

constexpr DistName kDistNames[] = {
    {DistributionSpec::Kind::kUniform, "uniform"},
    {DistributionSpec::Kind::kRowNorm, "row-norm"},
    {DistributionSpec::Kind::kWeights, "weights"},
    {DistributionSpec::Kind::kRowSubset, "row-subset"},
    {DistributionSpec::Kind::kAggregate, "aggregate"},
};

[[noreturn]] void fail(const std::string& what) {
  throw InvalidInputError("problem file: " + what);
}

json vector_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Vector vector_from(const json& j, const char* field) {
  if (!j.is_array()) fail(std::string(field) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(std::string(field) + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, const char* field) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("data")) {
    fail(std::string(field) + " needs rows, cols and data");
  }
  const auto rows = j.at("rows").get<std::int64_t>();
  const auto cols = j.at("cols").get<std::int64_t>();
  const Vector data = vector_from(j.at("data"), field);
  if (rows < 0 || cols < 0 || data.size() != rows * cols) {
    fail(std::string(field) + " data length does not match rows * cols");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data(i * cols + j2);
  }
  return m;
}

Vector optional_vector(const json& j, const char* field) {
  return j.contains(field) ? vector_from(j.at(field), field) : Vector();
}

Matrix optional_matrix(const json& j, const char* field) {
  return j.contains(field) ? matrix_from(j.at(field), field) : Matrix();
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

bool finite(const Matrix& m) { return m.allFinite(); }

// Entries of the members' weight vector, for kinds with a finite row list.
Eigen::Index member_count(const ProblemFile& f) {
  switch (f.kind) {
    case ProblemKind::kLinearEquality:
    case ProblemKind::kLinearInequality:
    case ProblemKind::kHalfspaceList:
      return f.a.rows();
    case ProblemKind::kBallIntersection:
      return f.centers.rows();
    case ProblemKind::kNormalCone:
      return f.omega_points.rows();
    case ProblemKind::kExample1:
      return 2;
    case ProblemKind::kSplitFeasibility:
      return 0;
  }
  return 0;
}

DiscreteDistribution member_weights(const ProblemFile& f) {
  const Eigen::Index m = member_count(f);
  switch (f.distribution.kind) {
    case DistributionSpec::Kind::kUniform:
      return uniform_weights(m);
    case DistributionSpec::Kind::kRowNorm:
      if (f.kind == ProblemKind::kNormalCone) {
        Matrix rel = f.omega_points.rowwise() - f.anchor.transpose();
        return row_norm_weights(rel);
      }
      return row_norm_weights(f.a);
    case DistributionSpec::Kind::kWeights:
      return DiscreteDistribution(f.distribution.weights);
    default:
      fail("sketch distributions apply to linear kinds only");
  }
}

Vector uniform_in_ball(const Vector& center, double radius, RngStream& rng) {
  const Eigen::Index n = center.size();
  Vector g = rng.normal_vector(n);
  while (g.norm() == 0.0) g = rng.normal_vector(n);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  return center + (r / g.norm()) * g;
}

Vector probe_point(const Vector& x, ProbeMode mode, double scale,
                   RngStream& rng) {
  if (mode == ProbeMode::kIterate) return x;
  return x + scale * rng.normal_vector(x.size());
}

}  // namespace

std::string to_string(ProblemKind k) {
  for (const auto& e : kKindNames) {
    if (e.kind == k) return e.name;
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  for (const auto& e : kKindNames) {
    if (name == e.name) return e.kind;
  }
  throw InvalidInputError("unknown problem kind '" + name + "'");
}

void validate(const ProblemFile& f) {
  require(f.dim >= 1, "dim must be at least 1");
  const Eigen::Index n = f.dim;
  const auto& d = f.distribution;
  const bool sketch = d.kind == DistributionSpec::Kind::kRowSubset ||
                      d.kind == DistributionSpec::Kind::kAggregate;
  switch (f.kind) {
    case ProblemKind::kLinearEquality:
    case ProblemKind::kLinearInequality:
    case ProblemKind::kHalfspaceList:
      require(f.a.rows() >= 1 && f.a.cols() == n, "A must be m x dim, m >= 1");
      require(f.b.size() == f.a.rows(), "b must have one entry per row of A");
      require(finite(f.a) && finite(f.b), "A and b must be finite");
      if (sketch) {
        require(f.kind != ProblemKind::kHalfspaceList,
                "halfspace-list supports member weights only");
        require(d.block >= 1 && d.block <= f.a.rows(),
                "sketch block must lie in [1, m]");
        require(!(f.kind == ProblemKind::kLinearInequality &&
                  d.kind == DistributionSpec::Kind::kRowSubset && d.block > 1),
                "inequality row subsets must have q = 1");
      }
      break;
    case ProblemKind::kBallIntersection:
      require(f.centers.rows() >= 1 && f.centers.cols() == n,
              "centers must be m x dim, m >= 1");
      require(f.radii.size() == f.centers.rows(),
              "radii must have one entry per center");
      require(f.radii.allFinite() && (f.radii.array() >= 0.0).all(),
              "radii must be finite and nonnegative");
      break;
    case ProblemKind::kSplitFeasibility:
      require(f.a.rows() >= 1 && f.a.cols() == n, "A must be m x dim");
      if (f.z_radius) {
        require(f.z_center.size() == f.a.rows(), "z_center must have m entries");
        require(*f.z_radius >= 0.0, "z_radius must be nonnegative");
      } else {
        require(f.z_lower.size() == f.a.rows() && f.z_upper.size() == f.a.rows(),
                "Z needs a ball or box bounds with m entries");
        require((f.z_lower.array() <= f.z_upper.array()).all(),
                "z_lower must not exceed z_upper");
      }
      require(f.probe_scale > 0.0, "probe_scale must be positive");
      break;
    case ProblemKind::kNormalCone:
      require(f.anchor.size() == n, "anchor must have dim entries");
      if (f.omega_points.rows() > 0) {
        require(f.omega_points.cols() == n, "omega_points must be k x dim");
      } else {
        require(f.omega_center.size() == n && f.omega_radius > 0.0,
                "Omega needs points or a ball with positive radius");
        require((f.anchor - f.omega_center).norm() <=
                    f.omega_radius * (1.0 + 1e-12),
                "anchor must lie in Omega");
      }
      break;
    case ProblemKind::kExample1:
      require(n == 2, "pathological-example-1 lives in dimension 2");
      require(f.power > 1.0, "power must exceed 1");
      break;
  }
  const bool finite_members = member_count(f) > 0;
  if (sketch) {
    require(f.kind == ProblemKind::kLinearEquality ||
                f.kind == ProblemKind::kLinearInequality,
            "sketch distributions apply to linear kinds only");
  } else if (finite_members && d.kind == DistributionSpec::Kind::kWeights) {
    require(d.weights.size() == member_count(f),
            "distribution weights must have one entry per member");
  } else if (!finite_members && d.kind != DistributionSpec::Kind::kUniform) {
    fail("generated families accept the uniform distribution only");
  }
  if (f.x_star) require(f.x_star->size() == n, "x_star must have dim entries");
}

json to_json(const ProblemFile& f) {
  json j;
  j["format"] = kFormat;
  j["version"] = kFormatVersion;
  j["kind"] = to_string(f.kind);
  if (!f.name.empty()) j["name"] = f.name;
  j["dim"] = f.dim;
  switch (f.kind) {
    case ProblemKind::kLinearEquality:
    case ProblemKind::kLinearInequality:
    case ProblemKind::kHalfspaceList:
      j["A"] = matrix_json(f.a);
      j["b"] = vector_json(f.b);
      break;
    case ProblemKind::kBallIntersection:
      j["centers"] = matrix_json(f.centers);
      j["radii"] = vector_json(f.radii);
      break;
    case ProblemKind::kSplitFeasibility:
      j["A"] = matrix_json(f.a);
      if (f.z_radius) {
        j["z"] = {{"ball", {{"center", vector_json(f.z_center)},
                            {"radius", *f.z_radius}}}};
      } else {
        j["z"] = {{"box", {{"lower", vector_json(f.z_lower)},
                           {"upper", vector_json(f.z_upper)}}}};
      }
      break;
    case ProblemKind::kNormalCone:
      j["anchor"] = vector_json(f.anchor);
      if (f.omega_points.rows() > 0) {
        j["omega"] = {{"points", matrix_json(f.omega_points)}};
      } else {
        j["omega"] = {{"ball", {{"center", vector_json(f.omega_center)},
                                {"radius", f.omega_radius}}}};
      }
      break;
    case ProblemKind::kExample1:
      j["power"] = f.power;
      break;
  }
  if (f.kind == ProblemKind::kSplitFeasibility ||
      (f.kind == ProblemKind::kNormalCone && f.omega_points.rows() == 0)) {
    j["probe"] = {
        {"mode", f.probe_mode == ProbeMode::kIterate ? "iterate" : "gaussian"},
        {"scale", f.probe_scale}};
  }
  json dist;
  for (const auto& e : kDistNames) {
    if (e.kind == f.distribution.kind) dist["kind"] = e.name;
  }
  if (f.distribution.kind == DistributionSpec::Kind::kWeights) {
    dist["weights"] = vector_json(f.distribution.weights);
  }
  if (f.distribution.kind == DistributionSpec::Kind::kRowSubset ||
      f.distribution.kind == DistributionSpec::Kind::kAggregate) {
    dist["block"] = f.distribution.block;
  }
  j["distribution"] = dist;
  if (f.x_star) j["x_star"] = vector_json(*f.x_star);
  return j;
}

ProblemFile problem_from_json(const json& j) {
  try {
    if (!j.is_object()) fail("top level must be an object");
    if (j.contains("format") && j.at("format") != kFormat) {
      fail("unrecognized format tag");
    }
    if (j.contains("version") && j.at("version").get<int>() != kFormatVersion) {
      fail("unsupported version");
    }
    ProblemFile f;
    f.kind = parse_problem_kind(j.at("kind").get<std::string>());
    f.name = j.value("name", std::string());
    f.dim = j.at("dim").get<std::int64_t>();
    f.a = optional_matrix(j, "A");
    f.b = optional_vector(j, "b");
    f.centers = optional_matrix(j, "centers");
    f.radii = optional_vector(j, "radii");
    if (j.contains("z")) {
      const json& z = j.at("z");
      if (z.contains("ball")) {
        f.z_center = vector_from(z.at("ball").at("center"), "z.center");
        f.z_radius = z.at("ball").at("radius").get<double>();
      } else if (z.contains("box")) {
        f.z_lower = vector_from(z.at("box").at("lower"), "z.lower");
        f.z_upper = vector_from(z.at("box").at("upper"), "z.upper");
      } else {
        fail("z must hold a ball or a box");
      }
    }
    f.anchor = optional_vector(j, "anchor");
    if (j.contains("omega")) {
      const json& o = j.at("omega");
      if (o.contains("points")) {
        f.omega_points = matrix_from(o.at("points"), "omega.points");
      } else if (o.contains("ball")) {
        f.omega_center = vector_from(o.at("ball").at("center"), "omega.center");
        f.omega_radius = o.at("ball").at("radius").get<double>();
      } else {
        fail("omega must hold points or a ball");
      }
    }
    if (j.contains("probe")) {
      const std::string mode = j.at("probe").value("mode", "iterate");
      if (mode == "iterate") {
        f.probe_mode = ProbeMode::kIterate;
      } else if (mode == "gaussian") {
        f.probe_mode = ProbeMode::kGaussian;
      } else {
        fail("probe mode must be iterate or gaussian");
      }
      f.probe_scale = j.at("probe").value("scale", 1.0);
    }
    f.power = j.value("power", 2.0);
    if (j.contains("distribution")) {
      const json& d = j.at("distribution");
      const std::string kind = d.value("kind", "uniform");
      bool known = false;
      for (const auto& e : kDistNames) {
        if (kind == e.name) {
          f.distribution.kind = e.kind;
          known = true;
        }
      }
      if (!known) fail("unknown distribution kind '" + kind + "'");
      if (d.contains("weights")) {
        f.distribution.weights = vector_from(d.at("weights"), "weights");
      }
      f.distribution.block = d.value("block", std::int64_t{1});
    }
    if (j.contains("x_star")) f.x_star = vector_from(j.at("x_star"), "x_star");
    validate(f);
    return f;
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError("cannot parse " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

void write_problem_file(const ProblemFile& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << to_json(f).dump(2) << "\n";
}

ProblemFile generate_linear_equality(Eigen::Index m, Eigen::Index n,
                                     RngStream& rng, bool normalize_rows) {
  if (m < 1 || n < 1) throw InvalidInputError("m and n must be at least 1");
  ProblemFile f;
  f.kind = ProblemKind::kLinearEquality;
  f.dim = n;
  f.a.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) f.a(i, j) = rng.normal();
  }
  if (normalize_rows) {
    for (Eigen::Index i = 0; i < m; ++i) f.a.row(i).normalize();
  }
  const Vector xs = rng.normal_vector(n);
  f.b = f.a * xs;
  f.x_star = xs;
  return f;
}

ProblemFile generate_linear_inequality(Eigen::Index m, Eigen::Index n,
                                       double slack_scale, RngStream& rng) {
  if (!(slack_scale >= 0.0)) throw InvalidInputError("slack_scale must be >= 0");
  ProblemFile f = generate_linear_equality(m, n, rng);
  f.kind = ProblemKind::kLinearInequality;
  for (Eigen::Index i = 0; i < m; ++i) {
    f.b(i) += slack_scale * (1.0 - rng.uniform());
  }
  return f;
}

ProblemFile generate_ball_intersection(Eigen::Index m, Eigen::Index n,
                                       double margin, RngStream& rng) {
  if (m < 1 || n < 1) throw InvalidInputError("m and n must be at least 1");
  if (!(margin > 0.0)) throw InvalidInputError("margin must be positive");
  ProblemFile f;
  f.kind = ProblemKind::kBallIntersection;
  f.dim = n;
  const Vector xs = rng.normal_vector(n);
  f.centers.resize(m, n);
  f.radii.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector g = rng.normal_vector(n);
    f.centers.row(i) = (xs + g).transpose();
    f.radii(i) = g.norm() + margin * (1.0 - rng.uniform());
  }
  f.x_star = xs;
  return f;
}

ProblemFile generate_split_feasibility(Eigen::Index m, Eigen::Index n,
                                       RngStream& rng) {
  if (m < 1 || n < 1) throw InvalidInputError("m and n must be at least 1");
  ProblemFile f;
  f.kind = ProblemKind::kSplitFeasibility;
  f.dim = n;
  f.a.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) f.a(i, j) = rng.normal();
  }
  const Vector xs = rng.normal_vector(n);
  const double r = 1.0 + rng.uniform();
  Vector c = rng.normal_vector(m);
  c *= 0.5 * r * rng.uniform() / std::max(c.norm(), 1e-300);
  f.z_center = f.a * xs + c;
  f.z_radius = r;
  f.x_star = xs;
  return f;
}

ProblemFile generate_normal_cone(Eigen::Index n, RngStream& rng) {
  if (n < 1) throw InvalidInputError("n must be at least 1");
  ProblemFile f;
  f.kind = ProblemKind::kNormalCone;
  f.dim = n;
  Vector u = rng.normal_vector(n);
  while (u.norm() == 0.0) u = rng.normal_vector(n);
  f.anchor = u / u.norm();
  f.omega_center = Vector::Zero(n);
  f.omega_radius = 1.0;
  f.x_star = f.anchor;
  return f;
}

ProblemFile generate_example1(double p) {
  if (!(p > 1.0)) throw InvalidInputError("example 1 needs p > 1");
  ProblemFile f;
  f.kind = ProblemKind::kExample1;
  f.dim = 2;
  f.power = p;
  f.x_star = Vector::Zero(2);
  return f;
}

std::optional<SketchSampler> sketch_sampler(const ProblemFile& f) {
  if (f.kind != ProblemKind::kLinearEquality &&
      f.kind != ProblemKind::kLinearInequality &&
      f.kind != ProblemKind::kHalfspaceList) {
    return std::nullopt;
  }
  switch (f.distribution.kind) {
    case DistributionSpec::Kind::kRowSubset:
      return SketchSampler::row_subset(f.a.rows(), f.distribution.block);
    case DistributionSpec::Kind::kAggregate:
      return SketchSampler::aggregate(f.a.rows(), f.distribution.block);
    default:
      return SketchSampler::coordinate(member_weights(f));
  }
}

FeasibilityProblem build_problem(const ProblemFile& f) {
  validate(f);
  const Eigen::Index n = f.dim;
  std::optional<FeasibilityProblem> p;
  switch (f.kind) {
    case ProblemKind::kLinearEquality:
    case ProblemKind::kLinearInequality:
    case ProblemKind::kHalfspaceList: {
      const auto kind = f.kind == ProblemKind::kLinearEquality
                            ? LinearStructure::Kind::kEquality
                            : LinearStructure::Kind::kInequality;
      p = make_sketched_problem(f.a, f.b, kind, *sketch_sampler(f));
      break;
    }
    case ProblemKind::kBallIntersection: {
      std::vector<ProjectableSet> sets;
      for (Eigen::Index i = 0; i < f.centers.rows(); ++i) {
        sets.emplace_back(Ball(f.centers.row(i).transpose(), f.radii(i)));
      }
      p.emplace(std::move(sets), member_weights(f));
      break;
    }
    case ProblemKind::kSplitFeasibility: {
      SplitFeasibilityFamily family{f.a, f.z_radius
                                             ? SimpleSet(Ball(f.z_center, *f.z_radius))
                                             : SimpleSet(Box(f.z_lower, f.z_upper))};
      const ProbeMode mode = f.probe_mode;
      const double scale = f.probe_scale;
      p.emplace(n, [family, mode, scale](const Vector& x, RngStream& rng) {
        return to_set(
            supporting_halfspace(probe_point(x, mode, scale, rng), family));
      });
      break;
    }
    case ProblemKind::kNormalCone: {
      const NormalConeFamily family{f.anchor};
      if (f.omega_points.rows() > 0) {
        std::vector<ProjectableSet> sets;
        for (Eigen::Index i = 0; i < f.omega_points.rows(); ++i) {
          sets.push_back(
              to_set(normal_cone_cut(f.omega_points.row(i).transpose(), family)));
        }
        p.emplace(std::move(sets), member_weights(f));
      } else {
        const Vector center = f.omega_center;
        const double radius = f.omega_radius;
        p.emplace(n, [family, center, radius](const Vector&, RngStream& rng) {
          return to_set(normal_cone_cut(uniform_in_ball(center, radius, rng),
                                        family));
        });
      }
      p->set_known_feasible(f.anchor);
      break;
    }
    case ProblemKind::kExample1: {
      Vector e2 = Vector::Zero(2);
      e2(1) = 1.0;
      p.emplace(std::vector<ProjectableSet>{PowerEpigraph(f.power),
                                            Hyperplane(e2, 0.0)},
                member_weights(f));
      p->set_solution_point(Vector::Zero(2));
      break;
    }
  }
  p->name = f.name.empty() ? to_string(f.kind) : f.name;
  if (f.x_star && f.kind != ProblemKind::kNormalCone) {
    p->set_known_feasible(*f.x_star);
  }
  return std::move(*p);
}

}  // namespace randproj
