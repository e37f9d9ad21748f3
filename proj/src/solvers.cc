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

#include "randproj/solvers.h"

#include <chrono>
#include <cmath>
#include <sstream>
#include <utility>

#include "randproj/conditioning.h"
#include "randproj/distance.h"
#include "randproj/objective.h"

namespace randproj {

StepsizePolicy StepsizePolicy::constant(double alpha, double margin) {
  StepsizePolicy p;
  p.kind = Kind::kConstant;
  p.alpha = alpha;
  p.margin = margin;
  return p;
}

StepsizePolicy StepsizePolicy::optimal() { return StepsizePolicy{}; }

StepsizePolicy StepsizePolicy::adaptive(double alpha_base, AdaptiveWeights w,
                                        AdaptiveSource s) {
  if (!(alpha_base > 0.0 && alpha_base < 2.0)) {
    throw InvalidInputError("adaptive alpha_base must lie in (0, 2)");
  }
  StepsizePolicy p;
  p.kind = Kind::kAdaptive;
  p.alpha = alpha_base;
  p.weights = w;
  p.source = s;
  return p;
}

StepsizePolicy StepsizePolicy::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) {
      throw InvalidInputError("bad stepsize number: '" + s + "'");
    }
    return v;
  };
  if (head == "optimal" && colon == std::string::npos) return optimal();
  if (colon == std::string::npos) {
    throw InvalidInputError("stepsize must be const:x, optimal or adaptive:x");
  }
  std::string rest = text.substr(colon + 1);
  if (head == "const" || head == "constant") return constant(number(rest));
  if (head == "adaptive") {
    AdaptiveWeights w = AdaptiveWeights::kUniform;
    AdaptiveSource src = AdaptiveSource::kMinibatch;
    std::size_t pos;
    while ((pos = rest.rfind(':')) != std::string::npos) {
      const std::string opt = rest.substr(pos + 1);
      if (opt == "residual") {
        w = AdaptiveWeights::kResidualNorm;
      } else if (opt == "expectation") {
        src = AdaptiveSource::kExpectation;
      } else if (opt != "uniform") {
        throw InvalidInputError("unknown adaptive option '" + opt + "'");
      }
      rest = rest.substr(0, pos);
    }
    return adaptive(number(rest), w, src);
  }
  throw InvalidInputError("unknown stepsize policy '" + head + "'");
}

std::string StepsizePolicy::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kConstant: os << "const:" << alpha; break;
    case Kind::kOptimalFixed: os << "optimal"; break;
    case Kind::kAdaptive:
      os << "adaptive:" << alpha
         << (weights == AdaptiveWeights::kResidualNorm ? ":residual" : "")
         << (source == AdaptiveSource::kExpectation ? ":expectation" : "");
      break;
  }
  return os.str();
}

std::string to_string(IterationTrace::Status s) {
  return s == IterationTrace::Status::kConverged ? "converged"
                                                 : "budget-exhausted";
}

Vector spa_step(const Vector& x, const std::vector<Vector>& projections,
                double alpha) {
  Vector mean = Vector::Zero(x.size());
  for (const Vector& p : projections) mean += p;
  mean /= static_cast<double>(projections.size());
  return x - alpha * (x - mean);
}

AdaptiveGamma compute_adaptive_gamma(const Vector& x,
                                     const std::vector<Vector>& projections,
                                     const Vector& weights) {
  if (weights.size() != static_cast<Eigen::Index>(projections.size()) ||
      projections.empty()) {
    throw InvalidInputError("adaptive gamma: weight count mismatch");
  }
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12) {
    throw InvalidInputError("adaptive gamma: weights must be a distribution");
  }
  Vector mean = Vector::Zero(x.size());
  double den = 0.0;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Vector r = x - projections[i];
    const double w = weights(static_cast<Eigen::Index>(i));
    mean += w * r;
    den += w * r.squaredNorm();
  }
  AdaptiveGamma out;
  if (den == 0.0) {
    out.gamma = 1.0;
    out.feasible = true;
    return out;
  }
  out.gamma = std::min(1.0, mean.squaredNorm() / den);
  return out;
}

double stepsize_for(const StepsizePolicy& policy, double gamma_n,
                    std::int64_t /*k*/) {
  if (!(gamma_n > 0.0) || gamma_n > 1.0 + 1e-10) {
    throw InvalidInputError("gamma_N must lie in (0, 1]");
  }
  switch (policy.kind) {
    case StepsizePolicy::Kind::kConstant: {
      const double hi = 2.0 / gamma_n - policy.margin;
      if (!(policy.alpha >= policy.margin && policy.alpha <= hi)) {
        std::ostringstream os;
        os << "constant stepsize " << policy.alpha << " outside ["
           << policy.margin << ", " << hi << "]";
        throw InvalidInputError(os.str());
      }
      return policy.alpha;
    }
    case StepsizePolicy::Kind::kOptimalFixed:
      return 1.0 / gamma_n;
    case StepsizePolicy::Kind::kAdaptive:
      return policy.alpha / gamma_n;
  }
  return 1.0;
}

namespace {

void validate_basic(const SolverConfig& config) {
  if (config.n < 1) throw InvalidInputError("minibatch size N must be >= 1");
  if (config.max_iters < 0) throw InvalidInputError("max_iters must be >= 0");
  if (config.trace_every < 1) throw InvalidInputError("trace_every must be >= 1");
  if (!(config.tol_f >= 0.0)) throw InvalidInputError("tol_F must be >= 0");
  if (config.recheck_samples < 1) {
    throw InvalidInputError("recheck_samples must be >= 1");
  }
  if (config.policy.kind == StepsizePolicy::Kind::kAdaptive &&
      !(config.policy.alpha > 0.0 && config.policy.alpha < 2.0)) {
    throw InvalidInputError("adaptive alpha_base must lie in (0, 2)");
  }
}

}  // namespace

void validate_config(const SolverConfig& config) {
  validate_basic(config);
  stepsize_for(config.policy, gamma_N(config.gamma, config.n));
}

namespace {

using Clock = std::chrono::steady_clock;

// Trace bookkeeping shared by the solvers.
class Recorder {
 public:
  Recorder(const FeasibilityProblem& problem, const SolverConfig& config,
           std::string algorithm)
      : config_(config), start_(Clock::now()) {
    trace_.algorithm = std::move(algorithm);
    if (config.compute_distance) oracle_ = make_distance_oracle(problem);
    x_star_ = problem.solution_point() ? problem.solution_point()
                                       : problem.known_feasible();
  }

  void record(std::int64_t k, const Vector& x, std::optional<double> alpha,
              std::optional<double> gamma_k, double f_hat, bool force) {
    if (!force && k % config_.trace_every != 0) return;
    TraceRecord r;
    r.k = k;
    r.alpha = alpha;
    r.gamma_k = gamma_k;
    r.f_hat = f_hat;
    if (oracle_) r.dist_exact = (*oracle_)(x).distance;
    if (x_star_) r.dist_star = (x - *x_star_).norm();
    r.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       Clock::now() - start_)
                       .count();
    // The final record may repeat the last stride point.
    if (!trace_.records.empty() && trace_.records.back().k == k) {
      trace_.records.back() = r;
      if (config_.record_iterates) trace_.iterates.back() = x;
      return;
    }
    trace_.records.push_back(r);
    if (config_.record_iterates) trace_.iterates.push_back(x);
  }

  void check_finite(std::int64_t k, const Vector& x) {
    if (!x.allFinite()) {
      trace_.final_x = x;
      trace_.iterations = k;
      throw SolverNumericalError(
          "non-finite iterate at k = " + std::to_string(k), trace_);
    }
  }

  IterationTrace finish(std::int64_t k, Vector x,
                        IterationTrace::Status status) {
    trace_.iterations = k;
    trace_.status = status;
    trace_.final_x = std::move(x);
    return std::move(trace_);
  }

 private:
  const SolverConfig& config_;
  Clock::time_point start_;
  IterationTrace trace_;
  std::optional<DistanceOracle> oracle_;
  std::optional<Vector> x_star_;
};

Vector initial_point(const FeasibilityProblem& problem,
                     const SolverConfig& config) {
  if (!config.x0) return Vector::Zero(problem.dim());
  if (config.x0->size() != problem.dim()) {
    throw InvalidInputError("x0 has the wrong dimension");
  }
  return *config.x0;
}

// Exact F on finite families; a large independent sample otherwise. The
// sample stream is split from the run stream, so the run itself is unchanged.
double recheck_F(const FeasibilityProblem& problem, const Vector& x,
                 const SolverConfig& config, const RngStream& rng,
                 std::int64_t k) {
  if (problem.is_finite()) return value_F(x, problem);
  RngStream check = rng.split(static_cast<std::uint64_t>(k));
  const Minibatch batch = problem.draw(x, config.recheck_samples, check);
  std::vector<Vector> proj;
  proj.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    proj.push_back(project(x, batch[i]));
  }
  return minibatch_F(x, proj);
}

Vector adaptive_weights(const Vector& x, const std::vector<Vector>& proj,
                        StepsizePolicy::AdaptiveWeights rule) {
  const auto n = static_cast<Eigen::Index>(proj.size());
  if (rule == StepsizePolicy::AdaptiveWeights::kUniform) {
    return Vector::Constant(n, 1.0 / static_cast<double>(n));
  }
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = (x - proj[static_cast<std::size_t>(i)]).norm();
  }
  const double total = w.sum();
  if (total == 0.0) return Vector::Constant(n, 1.0 / static_cast<double>(n));
  return w / total;
}

}  // namespace

IterationTrace run_spa(const FeasibilityProblem& problem,
                       const SolverConfig& config, RngStream& rng) {
  validate_config(config);
  const bool adaptive = config.policy.kind == StepsizePolicy::Kind::kAdaptive;
  if (adaptive &&
      config.policy.source == StepsizePolicy::AdaptiveSource::kExpectation &&
      !problem.is_finite()) {
    throw InvalidInputError("expectation-based adaptive gamma needs a finite family");
  }
  const double fixed_gamma_n = gamma_N(config.gamma, config.n);
  const double inv_n = 1.0 / static_cast<double>(config.n);
  Recorder rec(problem, config, config.n == 1 ? "sap" : "spa");
  Vector x = initial_point(problem, config);
  std::vector<Vector> proj(static_cast<std::size_t>(config.n));

  for (std::int64_t k = 0;; ++k) {
    if (k >= config.max_iters) {
      rec.record(k, x, std::nullopt, std::nullopt,
                 problem.is_finite() ? value_F(x, problem) : 0.0, true);
      return rec.finish(k, std::move(x),
                        IterationTrace::Status::kBudgetExhausted);
    }
    const Minibatch batch = problem.draw(x, config.n, rng);
    for (std::size_t i = 0; i < batch.size(); ++i) proj[i] = project(x, batch[i]);
    const double f_hat = minibatch_F(x, proj);
    if (f_hat <= config.tol_f) {
      if (recheck_F(problem, x, config, rng, k) <= config.tol_f) {
        rec.record(k, x, std::nullopt, std::nullopt, f_hat, true);
        return rec.finish(k, std::move(x), IterationTrace::Status::kConverged);
      }
      if (f_hat == 0.0) {
        // Every sampled set already holds x: no step, no stepsize decision.
        rec.record(k, x, std::nullopt, std::nullopt, f_hat, false);
        continue;
      }
    }
    std::optional<double> gamma_k;
    double gamma_n = fixed_gamma_n;
    if (adaptive) {
      if (config.policy.source == StepsizePolicy::AdaptiveSource::kExpectation) {
        const ObjectiveEval ev = evaluate_objective(x, problem);
        gamma_k = ev.value > 0.0
                      ? std::min(1.0, ev.gradient.squaredNorm() / (2.0 * ev.value))
                      : 1.0;
      } else {
        gamma_k = compute_adaptive_gamma(
                      x, proj, adaptive_weights(x, proj, config.policy.weights))
                      .gamma;
      }
      // The 1/N floor keeps the step finite when residuals cancel.
      gamma_n = inv_n + (1.0 - inv_n) * *gamma_k;
    }
    const double alpha = stepsize_for(config.policy, gamma_n, k);
    rec.record(k, x, alpha, gamma_k, f_hat, false);
    x = spa_step(x, proj, alpha);
    rec.check_finite(k + 1, x);
  }
}

IterationTrace run_spa(const FeasibilityProblem& problem,
                       const SolverConfig& config) {
  RngStream rng(config.seed);
  return run_spa(problem, config, rng);
}

IterationTrace run_sap(const FeasibilityProblem& problem,
                       const SolverConfig& config, RngStream& rng) {
  SolverConfig c = config;
  c.n = 1;
  return run_spa(problem, c, rng);
}

IterationTrace run_avp(const FeasibilityProblem& problem,
                       const SolverConfig& config) {
  if (!problem.is_finite()) {
    throw InvalidInputError("AvP needs a finite family with explicit weights");
  }
  validate_basic(config);
  // N -> infinity: gamma_N is gamma itself.
  stepsize_for(config.policy, config.gamma);
  Recorder rec(problem, config, "avp");
  Vector x = initial_point(problem, config);
  for (std::int64_t k = 0;; ++k) {
    const ObjectiveEval ev = evaluate_objective(x, problem);
    if (ev.value <= config.tol_f) {
      rec.record(k, x, std::nullopt, std::nullopt, ev.value, true);
      return rec.finish(k, std::move(x), IterationTrace::Status::kConverged);
    }
    if (k >= config.max_iters) {
      rec.record(k, x, std::nullopt, std::nullopt, ev.value, true);
      return rec.finish(k, std::move(x),
                        IterationTrace::Status::kBudgetExhausted);
    }
    std::optional<double> gamma_k;
    double g = config.gamma;
    if (config.policy.kind == StepsizePolicy::Kind::kAdaptive) {
      gamma_k = std::min(1.0, ev.gradient.squaredNorm() / (2.0 * ev.value));
      g = std::max(*gamma_k, 1e-12);
    }
    const double alpha = stepsize_for(config.policy, g, k);
    rec.record(k, x, alpha, gamma_k, ev.value, false);
    x -= alpha * ev.gradient;
    rec.check_finite(k + 1, x);
  }
}

IterationTrace run_bap(const FeasibilityProblem& problem, BapOrder order,
                       const SolverConfig& config, RngStream& rng) {
  SolverConfig c = config;
  c.n = 1;
  c.policy = StepsizePolicy::constant(1.0);
  if (order == BapOrder::kRandom) {
    IterationTrace t = run_sap(problem, c, rng);
    t.algorithm = "bap-random";
    return t;
  }
  if (!problem.is_finite()) {
    throw InvalidInputError("cyclic B-AP needs a finite family");
  }
  validate_config(c);
  std::vector<std::size_t> order_idx;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (problem.distribution().weight(static_cast<Eigen::Index>(i)) > 0.0) {
      order_idx.push_back(i);
    }
  }
  Recorder rec(problem, c, "bap-cyclic");
  Vector x = initial_point(problem, c);
  const auto& sets = problem.sets();
  for (std::int64_t k = 0;; ++k) {
    if (k >= c.max_iters) {
      rec.record(k, x, std::nullopt, std::nullopt, value_F(x, problem), true);
      return rec.finish(k, std::move(x),
                        IterationTrace::Status::kBudgetExhausted);
    }
    const ProjectableSet& s =
        sets[order_idx[static_cast<std::size_t>(k) % order_idx.size()]];
    const Vector p = project(x, s);
    const double f_hat = 0.5 * (x - p).squaredNorm();
    if (f_hat <= c.tol_f && value_F(x, problem) <= c.tol_f) {
      rec.record(k, x, std::nullopt, std::nullopt, f_hat, true);
      return rec.finish(k, std::move(x), IterationTrace::Status::kConverged);
    }
    rec.record(k, x, 1.0, std::nullopt, f_hat, false);
    x = p;
    rec.check_finite(k + 1, x);
  }
}

}  // namespace randproj
