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

// Minibatch stochastic projection (SPA) and its special cases:
//   SAP   N = 1
//   AvP   the deterministic step x - alpha (x - E[P_S x])
//   B-AP  plain projection onto one set per step, cyclic or random.

#ifndef RANDPROJ_SOLVERS_H_
#define RANDPROJ_SOLVERS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randproj/problem.h"
#include "randproj/sampling.h"
#include "randproj/types.h"

namespace randproj {

struct StepsizePolicy {
  enum class Kind { kConstant, kOptimalFixed, kAdaptive };
  enum class AdaptiveWeights { kUniform, kResidualNorm };
  // Minibatch ratio, or the exact expectation on finite families.
  enum class AdaptiveSource { kMinibatch, kExpectation };

  Kind kind = Kind::kOptimalFixed;
  double alpha = 1.0;  // constant value, or alpha_base for kAdaptive
  double margin = 1e-6;
  AdaptiveWeights weights = AdaptiveWeights::kUniform;
  AdaptiveSource source = AdaptiveSource::kMinibatch;

  static StepsizePolicy constant(double alpha, double margin = 1e-6);
  static StepsizePolicy optimal();
  static StepsizePolicy adaptive(
      double alpha_base, AdaptiveWeights w = AdaptiveWeights::kUniform,
      AdaptiveSource s = AdaptiveSource::kMinibatch);

  // "const:0.5", "optimal", "adaptive:1.5" (CLI syntax).
  static StepsizePolicy parse(const std::string& text);
  std::string to_string() const;
};

struct SolverConfig {
  int n = 1;
  StepsizePolicy policy;
  std::int64_t max_iters = 1000;
  double tol_f = 1e-20;
  std::uint64_t seed = 0;
  std::int64_t trace_every = 1;
  bool record_iterates = false;
  bool compute_distance = true;
  // gamma of the family; 1 is always valid.
  double gamma = 1.0;
  std::optional<Vector> x0;  // zero when absent
  // Sets drawn for the convergence recheck on generated families.
  int recheck_samples = 1000;
};

struct TraceRecord {
  std::int64_t k = 0;
  std::optional<double> alpha;    // step taken from x^k; empty at the end
  std::optional<double> gamma_k;  // adaptive estimate
  double f_hat = 0.0;             // F on the minibatch drawn at x^k
  std::optional<double> dist_exact;
  std::optional<double> dist_star;  // ||x^k - x*|| when x* is known
  std::int64_t elapsed_ns = 0;
};

struct IterationTrace {
  enum class Status { kConverged, kBudgetExhausted };

  std::string algorithm;
  std::vector<TraceRecord> records;
  std::vector<Vector> iterates;  // aligned with records when recorded
  Status status = Status::kBudgetExhausted;
  std::int64_t iterations = 0;
  Vector final_x;
};

std::string to_string(IterationTrace::Status s);

// Raised when an iterate becomes non-finite; carries the partial trace.
class SolverNumericalError : public NumericalError {
 public:
  SolverNumericalError(const std::string& what, IterationTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

// x - alpha (x - mean of projections), summed in index order.
Vector spa_step(const Vector& x, const std::vector<Vector>& projections,
                double alpha);

struct AdaptiveGamma {
  double gamma = 1.0;
  bool feasible = false;  // every residual is zero
};

// ||sum w_i r_i||^2 / sum w_i ||r_i||^2 with r_i = x - P_i(x). Weights must be
// nonnegative and sum to 1; zero weights are allowed so residual-norm weights
// can drop sets that x already satisfies.
AdaptiveGamma compute_adaptive_gamma(const Vector& x,
                                     const std::vector<Vector>& projections,
                                     const Vector& weights);

// Step for the given gamma_N (or gamma_N^k for adaptive policies). Throws
// InvalidInputError if a constant step lies outside [margin, 2/gamma_N -
// margin] or gamma_n is outside (0, 1].
double stepsize_for(const StepsizePolicy& policy, double gamma_n,
                    std::int64_t k = 0);

// Validates N, iteration budget, stride and the stepsize window.
void validate_config(const SolverConfig& config);

IterationTrace run_spa(const FeasibilityProblem& problem,
                       const SolverConfig& config, RngStream& rng);
IterationTrace run_spa(const FeasibilityProblem& problem,
                       const SolverConfig& config);

// run_spa with N forced to 1.
IterationTrace run_sap(const FeasibilityProblem& problem,
                       const SolverConfig& config, RngStream& rng);

// Deterministic x - alpha grad F(x). OptimalFixed uses 1 / config.gamma.
IterationTrace run_avp(const FeasibilityProblem& problem,
                       const SolverConfig& config);

enum class BapOrder { kCyclic, kRandom };

// alpha = 1 projections. Random order is run_sap with alpha = 1; cyclic order
// visits positive-weight sets in index order.
IterationTrace run_bap(const FeasibilityProblem& problem, BapOrder order,
                       const SolverConfig& config, RngStream& rng);

}  // namespace randproj

#endif  // RANDPROJ_SOLVERS_H_
