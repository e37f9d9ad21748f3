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

// Probe-based checks of the geometric inequalities satisfied by F, grad F and
// the averaged projection operator, plus rate fitting on solver traces.

#ifndef RANDPROJ_DIAGNOSTICS_H_
#define RANDPROJ_DIAGNOSTICS_H_

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "randproj/distance.h"
#include "randproj/objective.h"
#include "randproj/problem.h"
#include "randproj/solvers.h"

namespace randproj {

struct TheoremCheckResult {
  std::string name;
  bool holds = true;
  // Smallest slack over all probes and inequalities; holds iff
  // worst_slack >= -tolerance.
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t probe_count = 0;
  double tolerance = 1e-8;
  std::optional<Vector> worst_probe;

  // Folds one inequality lhs <= rhs evaluated at `probe`.
  void add(double lhs, double rhs, const Vector& probe);
  // Folds a precomputed slack.
  void add_slack(double slack, const Vector& probe);
  void finalize();
};

// (rhs - lhs) / max(|lhs|, |rhs|), or 0 when both sides vanish.
double relative_slack(double lhs, double rhs);

using ProbePairs = std::vector<std::pair<Vector, Vector>>;

// x*-centered Gaussian probes (see gaussian_probes) for a problem with a known
// feasible point or solution point.
std::vector<Vector> default_probes(const FeasibilityProblem& p,
                                   std::size_t count, RngStream& rng);
ProbePairs default_probe_pairs(const FeasibilityProblem& p, std::size_t count,
                               RngStream& rng);

// d^2/(2 kappa) <= F <= gamma d^2 / 2 and
// ||grad F||^2 / (2 gamma) <= F <= kappa ||grad F||^2 / 2, with d = dist_X.
TheoremCheckResult check_sandwich(const FeasibilityProblem& p, double kappa,
                                  double gamma,
                                  const std::vector<Vector>& probes,
                                  const DistanceOracle& oracle,
                                  double tolerance = 1e-8);

// (1 - gamma) d^2 <= <P(x) - x*, x - x*> <= (1 - 1/kappa) d^2 with
// x* = P_X(x) and P the averaged projection.
TheoremCheckResult check_operator_contraction(
    const FeasibilityProblem& p, double kappa, double gamma,
    const std::vector<Vector>& probes, const DistanceOracle& oracle,
    double tolerance = 1e-8);

// <P(x) - P(y), x - y> >= ||P(x) - P(y)||^2, slack scaled by
// max(1, ||x - y||^2).
TheoremCheckResult check_firm_nonexpansive(const FeasibilityProblem& p,
                                           const ProbePairs& pairs,
                                           double tolerance = 1e-10);

// ||grad F(x) - grad F(y)|| <= ||x - y||.
TheoremCheckResult check_gradient_lipschitz(const FeasibilityProblem& p,
                                            const ProbePairs& pairs,
                                            double tolerance = 1e-8);

// F(x) = 1/2 sum p_i ||x - P_i(x)||^2 evaluated through the set distances;
// absolute tolerance.
TheoremCheckResult check_relation_identity(const FeasibilityProblem& p,
                                           const std::vector<Vector>& probes,
                                           double tolerance = 1e-12);

// ||grad F||^2 <= 2 gamma F <= 2 F.
TheoremCheckResult check_jensen_chain(const FeasibilityProblem& p,
                                      double gamma,
                                      const std::vector<Vector>& probes,
                                      double tolerance = 1e-8);

// F >= 0 at the probes and F(x) = 0 at the feasible probes supplied.
TheoremCheckResult check_objective_zero_set(
    const FeasibilityProblem& p, const std::vector<Vector>& probes,
    const std::vector<Vector>& feasible_points, double tolerance = 1e-12);

// Central differences with step h*(1 + |x_j|) against grad F; relative error
// measured against max(1, ||grad F||) per probe.
TheoremCheckResult check_gradient_finite_difference(
    const FeasibilityProblem& p, const std::vector<Vector>& probes,
    double tolerance = 1e-6, double h = 1e-6);

struct RateFit {
  std::vector<double> factors;  // per recorded step
  double geometric_mean = 0.0;
  double optimal_bound = 0.0;   // 1 - 1/(gamma_N kappa)
  double general_bound = 0.0;   // 1 - delta^2 gamma_N / kappa
  bool f_based = false;         // factors from F values; no distance column
  // F(x_hat^k) and d_0^2 / (2 delta gamma_N Sigma_k) for k = 1, 2, ...;
  // filled when iterates were recorded on a finite family.
  std::vector<double> averaged_f;
  std::vector<double> sublinear_bound;
  bool sublinear_holds = true;
};

// delta is the stepsize margin: min over the run of min(alpha, 2/gamma_N -
// alpha) when passed as 0.
RateFit fit_rates(const IterationTrace& trace, double kappa, double gamma_n,
                  double delta = 0.0,
                  const FeasibilityProblem* problem = nullptr);

struct EnsembleStep {
  std::int64_t k = 0;
  double mean = 0.0;  // mean of dist^2(k+1)/dist^2(k) over runs
  double std_error = 0.0;
  std::size_t runs = 0;
};

struct EnsembleRateCheck {
  std::vector<EnsembleStep> steps;
  double bound = 0.0;
  bool holds = true;  // mean <= bound + 3 SE at every step
  double worst_excess = -std::numeric_limits<double>::infinity();
  double mean_factor = 0.0;  // average of the step means
};

// Runs without a distance at k or k+1, or with zero distance at k, are
// excluded from that step.
EnsembleRateCheck ensemble_rate_check(const std::vector<IterationTrace>& runs,
                                      double bound);

}  // namespace randproj

#endif  // RANDPROJ_DIAGNOSTICS_H_
