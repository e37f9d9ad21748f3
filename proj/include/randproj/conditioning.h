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

// Conditioning constants of a stochastic feasibility reformulation:
//   gamma   smallest c with ||E[x - P_S x]||^2 <= c E[||x - P_S x||^2]
//   kappa   smallest c with dist_X(x)^2 <= c E[dist_{X_S}(x)^2]
//   gamma_N 1/N + (1 - 1/N) gamma, the minibatch-effective gamma.

#ifndef RANDPROJ_CONDITIONING_H_
#define RANDPROJ_CONDITIONING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randproj/distance.h"
#include "randproj/problem.h"
#include "randproj/sampling.h"
#include "randproj/types.h"

namespace randproj {

// E[S (S^T A A^T S)^+ S^T], an m x m symmetric matrix.
struct ExpectationMatrix {
  Matrix e;
  bool exact = true;
  std::uint64_t sample_count = 0;  // members summed, or Monte-Carlo draws
};

struct ExpectationOptions {
  std::uint64_t enumerate_cap = 100000;
  std::uint64_t monte_carlo_samples = 20000;
  std::uint64_t seed = 0;  // Monte-Carlo stream
};

ExpectationMatrix expectation_matrix(const Matrix& a,
                                     const SketchSampler& sampler,
                                     const ExpectationOptions& options = {});

// A^T E A, symmetrized.
Matrix sketched_operator(const Matrix& a, const ExpectationMatrix& e);

struct LinearConditioning {
  double gamma = 1.0;
  double kappa = 1.0;
  bool exact = true;
  std::uint64_t sample_count = 0;
  // Standard error of gamma and kappa over 10 batch means; 0 when exact.
  double gamma_std_error = 0.0;
  double kappa_std_error = 0.0;
};

// gamma = lambda_max(A^T E A), kappa = 1 / lambda_min_nz(A^T E A).
// Throws InvalidInputError for an empty system, NumericalError when
// A^T E A is numerically zero (no regularity).
LinearConditioning linear_conditioning(const Matrix& a,
                                       const SketchSampler& sampler,
                                       const ExpectationOptions& options = {});

double gamma_linear_system(const Matrix& a, const SketchSampler& sampler);
double kappa_linear_system(const Matrix& a, const SketchSampler& sampler);
// Same assembly; rejects sketches with more than one column.
double gamma_linear_inequalities(const Matrix& a, const SketchSampler& sampler);

// Error-bound constants for {Ax <= b} with respect to a sketch family Omega:
//   dist_X(x)^2 <= max_form * max_S P+(S^T(Ax - b))^2
//   dist_X(x)^2 <= sum_form * sum_S P+(S^T(Ax - b))^2
// A valid max_form constant is also a valid sum_form constant.
struct HoffmanConstants {
  double max_form = 0.0;
  double sum_form = 0.0;
  std::size_t probes_used = 0;
  bool estimated = false;
  static HoffmanConstants supplied(double value);
};

struct HalfspaceKappa {
  double uniform_bound = 0.0;   // max ||A^T S||^2 / min p_S * max_form
  double norm_weighted = 0.0;   // sum ||A^T S||^2 * sum_form
  // True when p_S is proportional to ||A^T S||^2, i.e. norm_weighted applies.
  bool weights_norm_proportional = false;
  std::string note;
  // The bound that applies to the given weights.
  double applicable() const {
    return weights_norm_proportional ? norm_weighted : uniform_bound;
  }
};

// Omega must be enumerable. A zero min p_S yields an infinite uniform bound.
HalfspaceKappa kappa_halfspaces(const Matrix& a, const SketchSampler& omega,
                                const HoffmanConstants& hoffman);

struct BallKappa {
  double value = 1.0;
  bool degenerate = false;  // x0 equals the ball center
};

// ||x0 - center||^2 / (radius^2 min_p). The constant is valid on the ball of
// radius ||x0 - center|| around the center, so it depends on x0.
BallKappa kappa_interior_ball(const Vector& center, double radius,
                              const Vector& x0, double min_p);

// 1/N + (1 - 1/N) gamma. Throws InvalidInputError for N < 1 or gamma outside
// (0, 1 + 1e-10].
double gamma_N(double gamma, std::int64_t n);

// Gaussian probes around `center`, cycling radii 0.1, 1, 10 times `scale`.
std::vector<Vector> gaussian_probes(const Vector& center, std::size_t count,
                                    double scale, RngStream& rng);

// Iterates of alpha = 1 random projections onto {x : S^T A x <= S^T b} with S
// drawn from omega, one run of `steps` steps per start, every `stride`-th
// infeasible iterate kept. These reach the slowly contracting regions that
// Gaussian probes around a feasible point miss.
std::vector<Vector> trajectory_probes(const Matrix& a, const Vector& b,
                                      const SketchSampler& omega,
                                      const std::vector<Vector>& starts,
                                      std::int64_t steps, std::int64_t stride,
                                      RngStream& rng);

struct EmpiricalEstimate {
  double value = 0.0;
  std::size_t probes_used = 0;
  std::size_t probes_skipped = 0;
};

// Max over probes of ||E[x - P x]||^2 / E[||x - P x||^2]. Feasible probes are
// skipped. Finite families only.
EmpiricalEstimate estimate_gamma_empirical(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes);
EmpiricalEstimate estimate_gamma_empirical(const FeasibilityProblem& p,
                                           std::size_t probe_count,
                                           RngStream& rng);

// Max over probes of dist_X(x)^2 / E[dist_{X_S}(x)^2].
EmpiricalEstimate estimate_kappa_empirical(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes,
                                           const DistanceOracle& oracle);
EmpiricalEstimate estimate_kappa_empirical(const FeasibilityProblem& p,
                                           std::size_t probe_count,
                                           const DistanceOracle& oracle,
                                           RngStream& rng);

// Lower estimates of both Hoffman constants over infeasible probes. Throws
// InvalidInputError when every probe is feasible.
HoffmanConstants estimate_hoffman(const Matrix& a, const Vector& b,
                                  const SketchSampler& omega,
                                  const std::vector<Vector>& probes,
                                  const DistanceOracle& oracle);
// Probes around the feasible point x_star; distances by the polyhedral QP.
HoffmanConstants estimate_hoffman(const Matrix& a, const Vector& b,
                                  const SketchSampler& omega,
                                  const Vector& x_star, std::size_t probe_count,
                                  RngStream& rng);

enum class ConditioningMethod {
  kClosedForm,
  kMonteCarloEstimate,
  kUserSuppliedHoffman,
  kEmpiricalEstimate,
};

std::string to_string(ConditioningMethod m);

struct ConditioningReport {
  double gamma = 1.0;
  double kappa = 1.0;  // may be +infinity
  double gamma_n = 1.0;
  double condition_number = 1.0;
  std::int64_t n = 1;
  ConditioningMethod method = ConditioningMethod::kClosedForm;
  std::optional<std::uint64_t> sample_count;
  std::vector<std::string> notes;

  // 1 - 1/(gamma_N kappa), the linear rate of the minibatch method.
  double spa_rate() const;
  // 1 - 1/(gamma kappa), the rate of the average projection method.
  double avp_rate() const;
};

// Fills gamma_N and the condition number and checks the report invariants
// (gamma <= 1, kappa >= 1, kappa gamma >= 1 within tolerance). A violated
// invariant is recorded as a note rather than thrown, since estimates may
// legitimately fall below the true constants.
ConditioningReport make_report(double gamma, double kappa, std::int64_t n,
                               ConditioningMethod method);

}  // namespace randproj

#endif  // RANDPROJ_CONDITIONING_H_
