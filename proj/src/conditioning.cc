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

#include "randproj/conditioning.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "randproj/linalg.h"
#include "randproj/objective.h"

namespace randproj {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBatches = 10;

// S (S^T A A^T S)^+ S^T added with the given weight.
void accumulate(const Matrix& a, const Matrix& s, double weight, Matrix& e) {
  if (s.rows() != a.rows()) {
    throw InvalidInputError("sketch rows do not match the system");
  }
  const Matrix ats = a.transpose() * s;
  const Matrix gram = ats.transpose() * ats;
  e.noalias() += weight * (s * pseudo_inverse(gram) * s.transpose());
}

double batch_std_error(const std::array<double, kBatches>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= kBatches;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= (kBatches - 1);
  return std::sqrt(var / kBatches);
}

double kappa_from_operator(const Matrix& op) {
  const double lmin = lambda_min_nonzero(op);
  if (lmin <= 0.0) {
    throw NumericalError(
        "sketched operator is numerically zero: no linear regularity");
  }
  return 1.0 / lmin;
}

void require_single_column(const SketchSampler& s) {
  if (s.mode() == SketchSampler::Mode::kRowSubset && s.block() > 1) {
    throw InvalidInputError("inequality sketches must be single columns");
  }
  if (s.mode() == SketchSampler::Mode::kFiniteFamily) {
    if (auto members = s.enumerate(std::numeric_limits<std::uint64_t>::max())) {
      for (const auto& mem : *members) {
        if (mem.sketch.cols() != 1) {
          throw InvalidInputError("inequality sketches must be single columns");
        }
      }
    }
  }
}

}  // namespace

ExpectationMatrix expectation_matrix(const Matrix& a,
                                     const SketchSampler& sampler,
                                     const ExpectationOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw InvalidInputError("expectation matrix of an empty system");
  }
  ExpectationMatrix out;
  out.e = Matrix::Zero(a.rows(), a.rows());
  if (auto members = sampler.enumerate(options.enumerate_cap)) {
    if (members->empty()) throw InvalidInputError("empty sketch family");
    for (const auto& mem : *members) {
      if (mem.weight > 0.0) accumulate(a, mem.sketch, mem.weight, out.e);
    }
    out.exact = true;
    out.sample_count = members->size();
  } else {
    if (options.monte_carlo_samples == 0) {
      throw InvalidInputError("Monte-Carlo sample count must be positive");
    }
    RngStream rng(options.seed);
    const double w = 1.0 / static_cast<double>(options.monte_carlo_samples);
    for (std::uint64_t k = 0; k < options.monte_carlo_samples; ++k) {
      accumulate(a, sampler.draw(rng), w, out.e);
    }
    out.exact = false;
    out.sample_count = options.monte_carlo_samples;
  }
  out.e = 0.5 * (out.e + out.e.transpose()).eval();
  return out;
}

Matrix sketched_operator(const Matrix& a, const ExpectationMatrix& e) {
  const Matrix op = a.transpose() * e.e * a;
  return 0.5 * (op + op.transpose());
}

LinearConditioning linear_conditioning(const Matrix& a,
                                       const SketchSampler& sampler,
                                       const ExpectationOptions& options) {
  const ExpectationMatrix e = expectation_matrix(a, sampler, options);
  const Matrix op = sketched_operator(a, e);
  LinearConditioning out;
  out.gamma = lambda_max(op);
  out.kappa = kappa_from_operator(op);
  out.exact = e.exact;
  out.sample_count = e.sample_count;
  if (!e.exact) {
    // Batch means on the same stream layout as the full estimate.
    const std::uint64_t per = std::max<std::uint64_t>(
        1, options.monte_carlo_samples / kBatches);
    std::array<double, kBatches> g{};
    std::array<double, kBatches> k{};
    RngStream rng(options.seed);
    for (int bt = 0; bt < kBatches; ++bt) {
      Matrix eb = Matrix::Zero(a.rows(), a.rows());
      for (std::uint64_t i = 0; i < per; ++i) {
        accumulate(a, sampler.draw(rng), 1.0 / static_cast<double>(per), eb);
      }
      const Matrix ob = a.transpose() * eb * a;
      const Matrix sym = 0.5 * (ob + ob.transpose());
      g[static_cast<std::size_t>(bt)] = lambda_max(sym);
      const double lmin = lambda_min_nonzero(sym);
      k[static_cast<std::size_t>(bt)] = lmin > 0.0 ? 1.0 / lmin : kInf;
    }
    out.gamma_std_error = batch_std_error(g);
    out.kappa_std_error = batch_std_error(k);
  }
  return out;
}

double gamma_linear_system(const Matrix& a, const SketchSampler& sampler) {
  const ExpectationMatrix e = expectation_matrix(a, sampler);
  return lambda_max(sketched_operator(a, e));
}

double kappa_linear_system(const Matrix& a, const SketchSampler& sampler) {
  const ExpectationMatrix e = expectation_matrix(a, sampler);
  return kappa_from_operator(sketched_operator(a, e));
}

double gamma_linear_inequalities(const Matrix& a,
                                 const SketchSampler& sampler) {
  require_single_column(sampler);
  return gamma_linear_system(a, sampler);
}

HoffmanConstants HoffmanConstants::supplied(double value) {
  if (!(value > 0.0)) {
    throw InvalidInputError("Hoffman constant must be positive");
  }
  HoffmanConstants h;
  h.max_form = value;
  h.sum_form = value;
  return h;
}

HalfspaceKappa kappa_halfspaces(const Matrix& a, const SketchSampler& omega,
                                const HoffmanConstants& hoffman) {
  const auto members = omega.enumerate();
  if (!members || members->empty()) {
    throw InvalidInputError("halfspace kappa needs an enumerable family");
  }
  double max_norm2 = 0.0;
  double sum_norm2 = 0.0;
  double min_p = kInf;
  std::vector<double> norms;
  for (const auto& mem : *members) {
    if (mem.sketch.cols() != 1 || mem.sketch.rows() != a.rows()) {
      throw InvalidInputError("halfspace sketches must be m x 1 vectors");
    }
    const double n2 = (a.transpose() * mem.sketch).squaredNorm();
    norms.push_back(n2);
    max_norm2 = std::max(max_norm2, n2);
    sum_norm2 += n2;
    min_p = std::min(min_p, mem.weight);
  }
  HalfspaceKappa out;
  if (min_p <= 0.0) {
    out.uniform_bound = kInf;
    out.note = "a family member has zero probability; uniform bound is infinite";
  } else {
    out.uniform_bound = max_norm2 / min_p * hoffman.max_form;
  }
  out.norm_weighted = sum_norm2 * hoffman.sum_form;
  out.weights_norm_proportional = sum_norm2 > 0.0;
  for (std::size_t i = 0; i < members->size(); ++i) {
    if (std::abs((*members)[i].weight - norms[i] / sum_norm2) > 1e-12) {
      out.weights_norm_proportional = false;
      break;
    }
  }
  return out;
}

BallKappa kappa_interior_ball(const Vector& center, double radius,
                              const Vector& x0, double min_p) {
  if (!(radius > 0.0)) throw InvalidInputError("ball radius must be positive");
  if (!(min_p >= 0.0) || min_p > 1.0) {
    throw InvalidInputError("min probability must lie in [0, 1]");
  }
  if (center.size() != x0.size()) {
    throw InvalidInputError("ball kappa: dimension mismatch");
  }
  BallKappa out;
  if (min_p == 0.0) {
    out.value = kInf;
    return out;
  }
  const double d2 = (x0 - center).squaredNorm();
  out.degenerate = d2 == 0.0;
  out.value = std::max(1.0, d2 / (radius * radius * min_p));
  return out;
}

double gamma_N(double gamma, std::int64_t n) {
  if (n < 1) throw InvalidInputError("minibatch size must be >= 1");
  if (!(gamma > 0.0) || gamma > 1.0 + 1e-10) {
    throw InvalidInputError("gamma must lie in (0, 1]");
  }
  const double inv = 1.0 / static_cast<double>(n);
  return inv + (1.0 - inv) * gamma;
}

std::vector<Vector> gaussian_probes(const Vector& center, std::size_t count,
                                    double scale, RngStream& rng) {
  static constexpr std::array<double, 3> kRadii = {0.1, 1.0, 10.0};
  const double norm = 1.0 / std::sqrt(static_cast<double>(center.size()));
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = kRadii[i % kRadii.size()] * scale * norm;
    out.push_back(center + r * rng.normal_vector(center.size()));
  }
  return out;
}

namespace {

Vector probe_center(const FeasibilityProblem& p) {
  if (p.solution_point()) return *p.solution_point();
  if (p.known_feasible()) return *p.known_feasible();
  throw InvalidInputError("probe generation needs a known feasible point");
}

double problem_scale(const Vector& center) {
  return std::max(1.0, center.norm());
}

bool near_zero(double sq, const Vector& x) {
  const double tol = kMembershipTol * (1.0 + x.norm());
  return sq <= tol * tol;
}

}  // namespace

EmpiricalEstimate estimate_gamma_empirical(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes) {
  EmpiricalEstimate out;
  for (const Vector& x : probes) {
    const ObjectiveEval ev = evaluate_objective(x, p);
    const double den = 2.0 * ev.value;
    if (near_zero(den, x)) {
      ++out.probes_skipped;
      continue;
    }
    out.value = std::max(out.value, ev.gradient.squaredNorm() / den);
    ++out.probes_used;
  }
  return out;
}

EmpiricalEstimate estimate_gamma_empirical(const FeasibilityProblem& p,
                                           std::size_t probe_count,
                                           RngStream& rng) {
  const Vector c = probe_center(p);
  return estimate_gamma_empirical(
      p, gaussian_probes(c, probe_count, problem_scale(c), rng));
}

EmpiricalEstimate estimate_kappa_empirical(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes,
                                           const DistanceOracle& oracle) {
  EmpiricalEstimate out;
  for (const Vector& x : probes) {
    const double d = oracle(x).distance;
    if (near_zero(d * d, x)) {
      ++out.probes_skipped;
      continue;
    }
    const double den = 2.0 * value_F(x, p);
    out.value = std::max(out.value, den > 0.0 ? d * d / den : kInf);
    ++out.probes_used;
  }
  return out;
}

EmpiricalEstimate estimate_kappa_empirical(const FeasibilityProblem& p,
                                           std::size_t probe_count,
                                           const DistanceOracle& oracle,
                                           RngStream& rng) {
  const Vector c = probe_center(p);
  return estimate_kappa_empirical(
      p, gaussian_probes(c, probe_count, problem_scale(c), rng), oracle);
}

std::vector<Vector> trajectory_probes(const Matrix& a, const Vector& b,
                                      const SketchSampler& omega,
                                      const std::vector<Vector>& starts,
                                      std::int64_t steps, std::int64_t stride,
                                      RngStream& rng) {
  if (a.rows() != b.size() || omega.rows() != a.rows()) {
    throw InvalidInputError("trajectory probes: dimension mismatch");
  }
  if (steps < 1 || stride < 1) {
    throw InvalidInputError("trajectory probes need steps, stride >= 1");
  }
  std::vector<Vector> out;
  for (const Vector& start : starts) {
    if (start.size() != a.cols()) {
      throw InvalidInputError("trajectory probes: start has wrong dimension");
    }
    Vector x = start;
    for (std::int64_t k = 0; k < steps; ++k) {
      const Matrix s = omega.draw(rng);
      const Vector r = (s.transpose() * (a * x - b)).cwiseMax(0.0);
      if (k % stride == 0 && (a * x - b).maxCoeff() > 0.0) out.push_back(x);
      if (r.squaredNorm() == 0.0) continue;
      // One aggregated inequality per column; columns handled in turn.
      for (Eigen::Index j = 0; j < s.cols(); ++j) {
        const Vector g = a.transpose() * s.col(j);
        const double viol = s.col(j).dot(a * x - b);
        const double g2 = g.squaredNorm();
        if (viol > 0.0 && g2 > 0.0) x -= (viol / g2) * g;
      }
    }
  }
  return out;
}

HoffmanConstants estimate_hoffman(const Matrix& a, const Vector& b,
                                  const SketchSampler& omega,
                                  const std::vector<Vector>& probes,
                                  const DistanceOracle& oracle) {
  const auto members = omega.enumerate();
  if (!members || members->empty()) {
    throw InvalidInputError("Hoffman estimate needs an enumerable family");
  }
  if (a.rows() != b.size()) {
    throw InvalidInputError("Hoffman estimate: A rows differ from b length");
  }
  Matrix s(a.rows(), static_cast<Eigen::Index>(members->size()));
  for (std::size_t i = 0; i < members->size(); ++i) {
    if ((*members)[i].sketch.cols() != 1) {
      throw InvalidInputError("Hoffman sketches must be m x 1 vectors");
    }
    s.col(static_cast<Eigen::Index>(i)) = (*members)[i].sketch;
  }
  HoffmanConstants out;
  out.estimated = true;
  for (const Vector& x : probes) {
    const Vector viol = (s.transpose() * (a * x - b)).cwiseMax(0.0);
    const double sum2 = viol.squaredNorm();
    if (sum2 == 0.0) continue;
    const double max2 = viol.cwiseAbs2().maxCoeff();
    const double d = oracle(x).distance;
    const double d2 = d * d;
    out.max_form = std::max(out.max_form, d2 / max2);
    out.sum_form = std::max(out.sum_form, d2 / sum2);
    ++out.probes_used;
  }
  if (out.probes_used == 0) {
    throw InvalidInputError("every Hoffman probe is feasible");
  }
  return out;
}

HoffmanConstants estimate_hoffman(const Matrix& a, const Vector& b,
                                  const SketchSampler& omega,
                                  const Vector& x_star, std::size_t probe_count,
                                  RngStream& rng) {
  const std::vector<Vector> probes =
      gaussian_probes(x_star, probe_count, problem_scale(x_star), rng);
  const DistanceOracle oracle = [&a, &b, &x_star](const Vector& x) {
    return project_polyhedron(x, a, b, x_star);
  };
  return estimate_hoffman(a, b, omega, probes, oracle);
}

std::string to_string(ConditioningMethod m) {
  switch (m) {
    case ConditioningMethod::kClosedForm: return "closed-form";
    case ConditioningMethod::kMonteCarloEstimate: return "monte-carlo-estimate";
    case ConditioningMethod::kUserSuppliedHoffman: return "user-supplied-hoffman";
    case ConditioningMethod::kEmpiricalEstimate: return "empirical-estimate";
  }
  return "unknown";
}

double ConditioningReport::spa_rate() const {
  return 1.0 - 1.0 / (gamma_n * kappa);
}

double ConditioningReport::avp_rate() const {
  return 1.0 - 1.0 / (gamma * kappa);
}

ConditioningReport make_report(double gamma, double kappa, std::int64_t n,
                               ConditioningMethod method) {
  ConditioningReport r;
  r.gamma = gamma;
  r.kappa = kappa;
  r.n = n;
  r.method = method;
  r.gamma_n = gamma_N(gamma, n);
  r.condition_number = kappa * gamma;
  if (gamma > 1.0 + 1e-10) r.notes.push_back("gamma exceeds 1");
  if (kappa < 1.0 - 1e-10) r.notes.push_back("kappa below 1");
  if (r.condition_number < 1.0 - 1e-8) {
    r.notes.push_back("kappa * gamma below 1");
  }
  return r;
}

}  // namespace randproj
