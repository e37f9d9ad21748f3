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

#include "randproj/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "randproj/conditioning.h"

namespace randproj {

double relative_slack(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return (rhs - lhs) / scale;
}

void TheoremCheckResult::add(double lhs, double rhs, const Vector& probe) {
  add_slack(relative_slack(lhs, rhs), probe);
}

void TheoremCheckResult::add_slack(double slack, const Vector& probe) {
  if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
  if (slack < worst_slack) {
    worst_slack = slack;
    worst_probe = probe;
  }
}

void TheoremCheckResult::finalize() {
  if (probe_count == 0) worst_slack = 0.0;
  holds = worst_slack >= -tolerance;
}

namespace {

TheoremCheckResult start(std::string name, double tolerance) {
  TheoremCheckResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

Vector center_of(const FeasibilityProblem& p) {
  if (p.solution_point()) return *p.solution_point();
  if (p.known_feasible()) return *p.known_feasible();
  throw InvalidInputError("probes need a known feasible point");
}

}  // namespace

std::vector<Vector> default_probes(const FeasibilityProblem& p,
                                   std::size_t count, RngStream& rng) {
  const Vector c = center_of(p);
  return gaussian_probes(c, count, std::max(1.0, c.norm()), rng);
}

ProbePairs default_probe_pairs(const FeasibilityProblem& p, std::size_t count,
                               RngStream& rng) {
  const std::vector<Vector> a = default_probes(p, count, rng);
  const std::vector<Vector> b = default_probes(p, count, rng);
  ProbePairs out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(a[i], b[i]);
  return out;
}

TheoremCheckResult check_sandwich(const FeasibilityProblem& p, double kappa,
                                  double gamma,
                                  const std::vector<Vector>& probes,
                                  const DistanceOracle& oracle,
                                  double tolerance) {
  TheoremCheckResult r = start("sandwich", tolerance);
  for (const Vector& x : probes) {
    const ObjectiveEval ev = evaluate_objective(x, p);
    const double d = oracle(x).distance;
    const double d2 = d * d;
    const double g2 = ev.gradient.squaredNorm();
    r.add(d2 / (2.0 * kappa), ev.value, x);
    r.add(ev.value, 0.5 * gamma * d2, x);
    r.add(g2 / (2.0 * gamma), ev.value, x);
    r.add(ev.value, 0.5 * kappa * g2, x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_operator_contraction(
    const FeasibilityProblem& p, double kappa, double gamma,
    const std::vector<Vector>& probes, const DistanceOracle& oracle,
    double tolerance) {
  TheoremCheckResult r = start("operator-contraction", tolerance);
  for (const Vector& x : probes) {
    const Vector xs = oracle(x).projection;
    const ObjectiveEval ev = evaluate_objective(x, p);
    const double d2 = (x - xs).squaredNorm();
    // P(x*) = x* because x* lies in every member.
    const double middle = (ev.mean_projection - xs).dot(x - xs);
    r.add((1.0 - gamma) * d2, middle, x);
    r.add(middle, (1.0 - 1.0 / kappa) * d2, x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_firm_nonexpansive(const FeasibilityProblem& p,
                                           const ProbePairs& pairs,
                                           double tolerance) {
  TheoremCheckResult r = start("firm-nonexpansive", tolerance);
  for (const auto& [x, y] : pairs) {
    const Vector px = evaluate_objective(x, p).mean_projection;
    const Vector py = evaluate_objective(y, p).mean_projection;
    const double inner = (px - py).dot(x - y);
    const double sq = (px - py).squaredNorm();
    r.add_slack((inner - sq) / std::max(1.0, (x - y).squaredNorm()), x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_gradient_lipschitz(const FeasibilityProblem& p,
                                            const ProbePairs& pairs,
                                            double tolerance) {
  TheoremCheckResult r = start("gradient-lipschitz", tolerance);
  for (const auto& [x, y] : pairs) {
    const double lhs = (grad_F(x, p) - grad_F(y, p)).norm();
    r.add(lhs, (x - y).norm(), x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_relation_identity(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes,
                                           double tolerance) {
  TheoremCheckResult r = start("relation-identity", tolerance);
  const auto& sets = p.sets();
  for (const Vector& x : probes) {
    const double f = value_F(x, p);
    double via_dist = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const double d = distance(x, sets[i]);
      via_dist += 0.5 * p.distribution().weight(static_cast<Eigen::Index>(i)) * d * d;
    }
    r.add_slack(-std::abs(f - via_dist) / std::max(1.0, f), x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_jensen_chain(const FeasibilityProblem& p,
                                      double gamma,
                                      const std::vector<Vector>& probes,
                                      double tolerance) {
  TheoremCheckResult r = start("jensen-chain", tolerance);
  for (const Vector& x : probes) {
    const ObjectiveEval ev = evaluate_objective(x, p);
    r.add(ev.gradient.squaredNorm(), 2.0 * gamma * ev.value, x);
    r.add(2.0 * gamma * ev.value, 2.0 * ev.value, x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_objective_zero_set(
    const FeasibilityProblem& p, const std::vector<Vector>& probes,
    const std::vector<Vector>& feasible_points, double tolerance) {
  TheoremCheckResult r = start("objective-zero-set", tolerance);
  for (const Vector& x : probes) {
    r.add_slack(std::min(0.0, value_F(x, p)), x);
    ++r.probe_count;
  }
  for (const Vector& x : feasible_points) {
    r.add_slack(-value_F(x, p) / std::max(1.0, x.squaredNorm()), x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

TheoremCheckResult check_gradient_finite_difference(
    const FeasibilityProblem& p, const std::vector<Vector>& probes,
    double tolerance, double h) {
  TheoremCheckResult r = start("gradient-finite-difference", tolerance);
  for (const Vector& x : probes) {
    const Vector g = grad_F(x, p);
    Vector fd(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double step = h * (1.0 + std::abs(x(j)));
      Vector xp = x;
      Vector xm = x;
      xp(j) += step;
      xm(j) -= step;
      fd(j) = (value_F(xp, p) - value_F(xm, p)) / (xp(j) - xm(j));
    }
    r.add_slack(-(fd - g).norm() / std::max(1.0, g.norm()), x);
    ++r.probe_count;
  }
  r.finalize();
  return r;
}

RateFit fit_rates(const IterationTrace& trace, double kappa, double gamma_n,
                  double delta, const FeasibilityProblem* problem) {
  RateFit fit;
  const auto& recs = trace.records;
  const bool have_dist =
      !recs.empty() &&
      std::all_of(recs.begin(), recs.end(),
                  [](const TraceRecord& r) { return r.dist_exact.has_value(); });
  fit.f_based = !have_dist;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const double dk = static_cast<double>(recs[i + 1].k - recs[i].k);
    double prev;
    double next;
    if (have_dist) {
      prev = *recs[i].dist_exact * *recs[i].dist_exact;
      next = *recs[i + 1].dist_exact * *recs[i + 1].dist_exact;
    } else {
      prev = recs[i].f_hat;
      next = recs[i + 1].f_hat;
    }
    if (prev <= 0.0) continue;
    fit.factors.push_back(std::pow(next / prev, 1.0 / dk));
  }
  if (!fit.factors.empty()) {
    double log_sum = 0.0;
    bool zero = false;
    for (double f : fit.factors) {
      if (f <= 0.0) {
        zero = true;
        break;
      }
      log_sum += std::log(f);
    }
    fit.geometric_mean =
        zero ? 0.0 : std::exp(log_sum / static_cast<double>(fit.factors.size()));
  }
  if (delta <= 0.0) {
    delta = 1.0 / gamma_n;
    for (const TraceRecord& r : recs) {
      if (r.alpha) delta = std::min({delta, *r.alpha, 2.0 / gamma_n - *r.alpha});
    }
  }
  fit.optimal_bound = 1.0 - 1.0 / (gamma_n * kappa);
  fit.general_bound = 1.0 - delta * delta * gamma_n / kappa;

  const bool consecutive =
      !recs.empty() && trace.iterates.size() == recs.size() &&
      std::all_of(recs.begin(), recs.end(), [&](const TraceRecord& r) {
        return r.k == static_cast<std::int64_t>(&r - recs.data());
      });
  if (problem != nullptr && problem->is_finite() && consecutive) {
    double d0 = 0.0;
    if (recs.front().dist_exact) {
      d0 = *recs.front().dist_exact;
    } else if (auto oracle = make_distance_oracle(*problem)) {
      d0 = (*oracle)(trace.iterates.front()).distance;
    }
    double sigma = 0.0;
    Vector weighted = Vector::Zero(trace.iterates.front().size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!recs[i].alpha) continue;
      sigma += *recs[i].alpha;
      weighted += *recs[i].alpha * trace.iterates[i];
      const double f = value_F(weighted / sigma, *problem);
      const double bound = d0 * d0 / (2.0 * delta * gamma_n * sigma);
      fit.averaged_f.push_back(f);
      fit.sublinear_bound.push_back(bound);
      if (f > bound * (1.0 + 1e-12)) fit.sublinear_holds = false;
    }
  }
  return fit;
}

EnsembleRateCheck ensemble_rate_check(const std::vector<IterationTrace>& runs,
                                      double bound) {
  struct Acc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
  };
  std::map<std::int64_t, Acc> acc;
  for (const IterationTrace& t : runs) {
    const auto& recs = t.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      if (recs[i + 1].k != recs[i].k + 1) continue;
      if (!recs[i].dist_exact || !recs[i + 1].dist_exact) continue;
      const double prev = *recs[i].dist_exact * *recs[i].dist_exact;
      if (prev <= 0.0) continue;
      const double ratio =
          *recs[i + 1].dist_exact * *recs[i + 1].dist_exact / prev;
      Acc& a = acc[recs[i].k];
      a.sum += ratio;
      a.sum_sq += ratio * ratio;
      ++a.n;
    }
  }
  EnsembleRateCheck out;
  out.bound = bound;
  double mean_sum = 0.0;
  for (const auto& [k, a] : acc) {
    EnsembleStep s;
    s.k = k;
    s.runs = a.n;
    s.mean = a.sum / static_cast<double>(a.n);
    if (a.n > 1) {
      const double var = std::max(
          0.0, (a.sum_sq - a.sum * s.mean) / static_cast<double>(a.n - 1));
      s.std_error = std::sqrt(var / static_cast<double>(a.n));
    }
    const double excess = s.mean - (bound + 3.0 * s.std_error);
    out.worst_excess = std::max(out.worst_excess, excess);
    if (excess > 0.0) out.holds = false;
    mean_sum += s.mean;
    out.steps.push_back(s);
  }
  if (!out.steps.empty()) {
    out.mean_factor = mean_sum / static_cast<double>(out.steps.size());
  }
  return out;
}

}  // namespace randproj
