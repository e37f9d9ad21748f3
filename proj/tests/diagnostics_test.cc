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
#include <vector>

#include "gtest/gtest.h"
#include "randproj/conditioning.h"

namespace randproj {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix gaussian(Eigen::Index m, Eigen::Index n, RngStream& rng) {
  Matrix a(m, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  return a;
}

FeasibilityProblem identity_toy() {
  FeasibilityProblem p = make_row_problem(
      Matrix::Identity(2, 2), vec2(1, 1), LinearStructure::Kind::kEquality,
      uniform_weights(2));
  p.set_known_feasible(vec2(1, 1));
  return p;
}

struct LinearCase {
  FeasibilityProblem problem;
  LinearConditioning cond;
};

LinearCase random_system(Eigen::Index m, Eigen::Index n, RngStream& rng) {
  const Matrix a = gaussian(m, n, rng);
  const Vector xs = rng.normal_vector(n);
  FeasibilityProblem p = make_row_problem(
      a, a * xs, LinearStructure::Kind::kEquality, uniform_weights(m));
  p.set_known_feasible(xs);
  return {p, linear_conditioning(a, SketchSampler::coordinate(uniform_weights(m)))};
}

// Halfspaces and balls around a common interior point.
FeasibilityProblem mixed_family(Eigen::Index n, RngStream& rng) {
  const Vector xs = rng.normal_vector(n);
  std::vector<ProjectableSet> sets;
  for (int i = 0; i < 6; ++i) {
    const Vector a = rng.normal_vector(n);
    sets.emplace_back(Halfspace(a, a.dot(xs) + rng.uniform()));
  }
  for (int i = 0; i < 3; ++i) {
    sets.emplace_back(Ball(xs + 0.3 * rng.normal_vector(n), 1.0 + rng.uniform()));
  }
  FeasibilityProblem p(std::move(sets), uniform_weights(9));
  p.set_known_feasible(xs);
  return p;
}

TEST(ValueFTest, Examples) {
  const FeasibilityProblem toy = identity_toy();
  EXPECT_DOUBLE_EQ(value_F(vec2(1, 1), toy), 0.0);
  EXPECT_DOUBLE_EQ(value_F(vec2(0, 0), toy), 0.5);
  const FeasibilityProblem one({Hyperplane(vec2(1, 0), 1.0)}, uniform_weights(1));
  EXPECT_DOUBLE_EQ(value_F(vec2(3, 4), one), 0.5 * 4.0);
}

TEST(GradFTest, Examples) {
  const FeasibilityProblem toy = identity_toy();
  EXPECT_EQ(grad_F(vec2(1, 1), toy), Vector::Zero(2));
  EXPECT_NEAR((grad_F(vec2(0, 0), toy) - vec2(-0.5, -0.5)).norm(), 0.0, 1e-16);
}

TEST(GradFTest, MatchesFiniteDifferences) {
  RngStream rng(10);
  const LinearCase lin = random_system(8, 5, rng);
  const FeasibilityProblem mix = mixed_family(4, rng);
  for (const FeasibilityProblem* p : {&lin.problem, &mix}) {
    const auto probes = default_probes(*p, 100, rng);
    const TheoremCheckResult r = check_gradient_finite_difference(*p, probes);
    EXPECT_TRUE(r.holds) << r.worst_slack;
    EXPECT_EQ(r.probe_count, 100u);
  }
}

TEST(SandwichTest, IdentityToyIsTightOnBothSides) {
  const FeasibilityProblem toy = identity_toy();
  const auto oracle = make_distance_oracle(toy);
  const TheoremCheckResult r =
      check_sandwich(toy, 2.0, 0.5, {vec2(0, 0)}, *oracle);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.worst_slack, 0.0, 1e-15);
  const TheoremCheckResult f =
      check_sandwich(toy, 2.0, 0.5, {vec2(1, 1)}, *oracle);
  EXPECT_EQ(f.worst_slack, 0.0);
}

TEST(SandwichTest, RandomSystemHoldsAndWrongKappaFails) {
  RngStream rng(20);
  const LinearCase c = random_system(20, 10, rng);
  const auto oracle = make_distance_oracle(c.problem);
  const auto probes = default_probes(c.problem, 100, rng);
  const TheoremCheckResult r =
      check_sandwich(c.problem, c.cond.kappa, c.cond.gamma, probes, *oracle);
  EXPECT_TRUE(r.holds) << r.worst_slack;
  const TheoremCheckResult bad =
      check_sandwich(c.problem, 1.0, c.cond.gamma, probes, *oracle);
  EXPECT_FALSE(bad.holds);
  EXPECT_TRUE(bad.worst_probe.has_value());
}

TEST(OperatorContractionTest, Examples) {
  const FeasibilityProblem toy = identity_toy();
  const auto oracle = make_distance_oracle(toy);
  const TheoremCheckResult tight =
      check_operator_contraction(toy, 2.0, 0.5, {vec2(0, 0)}, *oracle);
  EXPECT_TRUE(tight.holds);
  EXPECT_NEAR(tight.worst_slack, 0.0, 1e-15);
  EXPECT_EQ(check_operator_contraction(toy, 2.0, 0.5, {vec2(1, 1)}, *oracle)
                .worst_slack,
            0.0);
  RngStream rng(30);
  const LinearCase c = random_system(20, 10, rng);
  const TheoremCheckResult r = check_operator_contraction(
      c.problem, c.cond.kappa, c.cond.gamma, default_probes(c.problem, 100, rng),
      *make_distance_oracle(c.problem));
  EXPECT_TRUE(r.holds) << r.worst_slack;
}

TEST(FirmNonexpansiveTest, Examples) {
  const FeasibilityProblem one({Hyperplane(vec2(1, 2), 0.5)}, uniform_weights(1));
  const TheoremCheckResult same =
      check_firm_nonexpansive(one, {{vec2(3, 1), vec2(3, 1)}});
  EXPECT_EQ(same.worst_slack, 0.0);
  RngStream rng(40);
  FeasibilityProblem single = one;
  single.set_known_feasible(vec2(0.5, 0));
  EXPECT_TRUE(check_firm_nonexpansive(single,
                                      default_probe_pairs(single, 50, rng))
                  .holds);
  const FeasibilityProblem mix = mixed_family(5, rng);
  const TheoremCheckResult r =
      check_firm_nonexpansive(mix, default_probe_pairs(mix, 200, rng));
  EXPECT_TRUE(r.holds) << r.worst_slack;
}

TEST(DiagnosticsPropertyTest, StructuralChecksOnRandomFamilies) {
  RngStream rng(50);
  for (int trial = 0; trial < 5; ++trial) {
    const FeasibilityProblem mix = mixed_family(4 + trial, rng);
    const auto probes = default_probes(mix, 100, rng);
    const auto pairs = default_probe_pairs(mix, 100, rng);
    EXPECT_TRUE(check_gradient_lipschitz(mix, pairs).holds);
    EXPECT_TRUE(check_relation_identity(mix, probes).holds);
    const TheoremCheckResult jc = check_jensen_chain(mix, 1.0, probes);
    EXPECT_TRUE(jc.holds) << jc.worst_slack;
    EXPECT_TRUE(
        check_objective_zero_set(mix, probes, {*mix.known_feasible()}).holds);
    const LinearCase c = random_system(15, 6, rng);
    EXPECT_TRUE(check_jensen_chain(c.problem, c.cond.gamma,
                                   default_probes(c.problem, 100, rng))
                    .holds);
  }
}

TEST(FitRatesTest, DeterministicAvpOnToy) {
  const FeasibilityProblem toy = identity_toy();
  SolverConfig c;
  c.gamma = 0.5;
  const IterationTrace t = run_avp(toy, c);
  const RateFit fit = fit_rates(t, 2.0, 0.5);
  ASSERT_EQ(fit.factors.size(), 1u);
  EXPECT_EQ(fit.factors[0], 0.0);
  EXPECT_EQ(fit.geometric_mean, 0.0);
  EXPECT_NEAR(fit.optimal_bound, 0.0, 1e-15);
}

TEST(FitRatesTest, SapEnsembleOnToyMatchesHalf) {
  const FeasibilityProblem toy = identity_toy();
  std::vector<IterationTrace> runs;
  for (int s = 0; s < 1000; ++s) {
    SolverConfig c;
    c.policy = StepsizePolicy::constant(1.0);
    c.max_iters = 1;
    c.x0 = vec2(-3, 2);
    c.seed = static_cast<std::uint64_t>(s);
    runs.push_back(run_spa(toy, c));
  }
  const EnsembleRateCheck e = ensemble_rate_check(runs, 0.5);
  ASSERT_EQ(e.steps.size(), 1u);
  EXPECT_NEAR(e.steps[0].mean, 0.5, 0.05);
  EXPECT_TRUE(e.holds);
  EXPECT_FALSE(ensemble_rate_check(runs, 0.3).holds);
}

TEST(FitRatesTest, AveragedIterateBelowSublinearBound) {
  RngStream rng(60);
  for (int trial = 0; trial < 3; ++trial) {
    const LinearCase c = random_system(20, 8, rng);
    for (int n : {1, 4}) {
      SolverConfig cfg;
      cfg.n = n;
      cfg.gamma = c.cond.gamma;
      cfg.max_iters = 500;
      cfg.tol_f = 0.0;
      cfg.record_iterates = true;
      cfg.seed = static_cast<std::uint64_t>(trial);
      cfg.x0 = rng.normal_vector(8) * 3.0;
      const IterationTrace t = run_spa(c.problem, cfg);
      const double gn = gamma_N(c.cond.gamma, n);
      const RateFit fit = fit_rates(t, c.cond.kappa, gn, 0.0, &c.problem);
      ASSERT_FALSE(fit.averaged_f.empty());
      // Records without a step (feasible minibatch, final) are skipped.
      const auto steps = std::count_if(
          t.records.begin(), t.records.end(),
          [](const TraceRecord& r) { return r.alpha.has_value(); });
      ASSERT_EQ(fit.averaged_f.size(), static_cast<std::size_t>(steps));
      EXPECT_TRUE(fit.sublinear_holds);
      // delta = 1/gamma_N for the optimal step: bound gamma_N d0^2 / (2k).
      const double d0 = *t.records[0].dist_exact;
      EXPECT_NEAR(fit.sublinear_bound[9], gn * d0 * d0 / 20.0,
                  1e-12 * fit.sublinear_bound[9]);
      EXPECT_FALSE(fit.f_based);
      EXPECT_GT(fit.geometric_mean, 0.0);
      EXPECT_LT(fit.geometric_mean, 1.0);
    }
  }
}

TEST(FitRatesTest, WithoutDistancesFallsBackToF) {
  RngStream rng(70);
  const LinearCase c = random_system(10, 4, rng);
  SolverConfig cfg;
  cfg.compute_distance = false;
  cfg.max_iters = 50;
  const IterationTrace t = run_spa(c.problem, cfg);
  const RateFit fit = fit_rates(t, c.cond.kappa, 1.0);
  EXPECT_TRUE(fit.f_based);
  EXPECT_TRUE(fit.averaged_f.empty());
}

}  // namespace
}  // namespace randproj
