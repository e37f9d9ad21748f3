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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "randproj/conditioning.h"
#include "randproj/objective.h"

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

// {x_1 = 1} and {x_2 = 1} with uniform weights; X = {(1, 1)}.
FeasibilityProblem identity_toy() {
  FeasibilityProblem p = make_row_problem(
      Matrix::Identity(2, 2), vec2(1, 1), LinearStructure::Kind::kEquality,
      uniform_weights(2));
  p.set_known_feasible(vec2(1, 1));
  return p;
}

FeasibilityProblem random_equality(Eigen::Index m, Eigen::Index n,
                                   RngStream& rng, bool row_norm) {
  const Matrix a = gaussian(m, n, rng);
  const Vector xs = rng.normal_vector(n);
  FeasibilityProblem p = make_row_problem(
      a, a * xs, LinearStructure::Kind::kEquality,
      row_norm ? row_norm_weights(a) : uniform_weights(m));
  p.set_known_feasible(xs);
  return p;
}

double dist2(const TraceRecord& r) { return *r.dist_exact * *r.dist_exact; }

TEST(SpaStepTest, Examples) {
  const Hyperplane h(vec2(1, 0), 1.0);
  const Vector x = vec2(0, 0);
  const Vector p = project(x, ProjectableSet(h));
  EXPECT_EQ(spa_step(x, {p}, 1.0), p);
  const Vector feas = vec2(1, 5);
  EXPECT_EQ(spa_step(feas, {feas, feas}, 1.7), feas);
  const Vector mid = spa_step(x, {vec2(1, 0), vec2(0, 1)}, 1.0);
  EXPECT_NEAR((mid - vec2(0.5, 0.5)).norm(), 0.0, 1e-16);
}

TEST(AdaptiveGammaTest, Examples) {
  const Vector x = vec2(0, 0);
  const Vector half = Vector::Constant(2, 0.5);
  EXPECT_NEAR(compute_adaptive_gamma(x, {vec2(1, 2), vec2(1, 2)}, half).gamma,
              1.0, 1e-15);
  EXPECT_NEAR(compute_adaptive_gamma(x, {vec2(1, 0), vec2(-1, 0)}, half).gamma,
              0.0, 1e-15);
  EXPECT_NEAR(compute_adaptive_gamma(x, {vec2(1, 0), vec2(0, 1)}, half).gamma,
              0.5, 1e-15);
  const AdaptiveGamma feas = compute_adaptive_gamma(x, {x, x}, half);
  EXPECT_TRUE(feas.feasible);
  EXPECT_DOUBLE_EQ(feas.gamma, 1.0);
  EXPECT_THROW(compute_adaptive_gamma(x, {x, x}, vec2(0.7, 0.7)),
               InvalidInputError);
}

TEST(StepsizeTest, Examples) {
  EXPECT_DOUBLE_EQ(stepsize_for(StepsizePolicy::optimal(), gamma_N(0.3, 1)), 1.0);
  EXPECT_DOUBLE_EQ(stepsize_for(StepsizePolicy::optimal(), 0.5), 2.0);
  // gamma^k = 0 with N = 4 floors gamma_N^k at 1/4.
  const double gk = 0.25 + 0.75 * 0.0;
  EXPECT_DOUBLE_EQ(stepsize_for(StepsizePolicy::adaptive(1.5), gk), 6.0);
  EXPECT_DOUBLE_EQ(stepsize_for(StepsizePolicy::constant(1.9), 1.0), 1.9);
  EXPECT_THROW(stepsize_for(StepsizePolicy::constant(2.0), 1.0),
               InvalidInputError);
  EXPECT_THROW(stepsize_for(StepsizePolicy::constant(0.0), 1.0),
               InvalidInputError);
  EXPECT_THROW(StepsizePolicy::adaptive(2.0), InvalidInputError);
  EXPECT_THROW(stepsize_for(StepsizePolicy::optimal(), 1.5), InvalidInputError);
}

TEST(StepsizeTest, ParseRoundTrip) {
  EXPECT_EQ(StepsizePolicy::parse("optimal").kind,
            StepsizePolicy::Kind::kOptimalFixed);
  const StepsizePolicy c = StepsizePolicy::parse("const:0.5");
  EXPECT_EQ(c.kind, StepsizePolicy::Kind::kConstant);
  EXPECT_DOUBLE_EQ(c.alpha, 0.5);
  const StepsizePolicy a = StepsizePolicy::parse("adaptive:1.5:residual");
  EXPECT_EQ(a.kind, StepsizePolicy::Kind::kAdaptive);
  EXPECT_EQ(a.weights, StepsizePolicy::AdaptiveWeights::kResidualNorm);
  EXPECT_EQ(StepsizePolicy::parse(a.to_string()).to_string(), a.to_string());
  EXPECT_THROW(StepsizePolicy::parse("const:abc"), InvalidInputError);
  EXPECT_THROW(StepsizePolicy::parse("fast"), InvalidInputError);
}

TEST(RunSpaTest, FeasibleStartConvergesAtZero) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.x0 = vec2(1, 1);
  const IterationTrace t = run_spa(p, c);
  EXPECT_EQ(t.status, IterationTrace::Status::kConverged);
  EXPECT_EQ(t.iterations, 0);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_FALSE(t.records[0].alpha.has_value());
}

TEST(RunSpaTest, InvalidConfigRejectedAtStart) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.policy = StepsizePolicy::constant(2.5);
  EXPECT_THROW(run_spa(p, c), InvalidInputError);
  c.policy = StepsizePolicy::optimal();
  c.n = 0;
  EXPECT_THROW(run_spa(p, c), InvalidInputError);
}

TEST(RunSpaTest, SapOnToyHalvesDistanceInExpectation) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.policy = StepsizePolicy::constant(1.0);
  c.max_iters = 1;
  c.x0 = vec2(-1.0, 3.0);
  double sum = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    c.seed = static_cast<std::uint64_t>(s);
    const IterationTrace t = run_spa(p, c);
    sum += dist2(t.records[1]) / dist2(t.records[0]);
  }
  const double mean = sum / seeds;
  EXPECT_GE(mean, 0.45);
  EXPECT_LE(mean, 0.55);
}

// With N = 2 drawn with replacement and alpha = 1/gamma_N = 4/3, the
// one-step expectation of dist^2 is 1/2 (1 - alpha/2)^2 + 1/4 (1 - alpha)^2
// + 1/4 = 1/3 times the current value, which equals the rate bound.
TEST(RunSpaTest, FullBatchToyMatchesRateBoundInExpectation) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.n = 2;
  c.gamma = 0.5;
  c.max_iters = 1;
  c.x0 = vec2(-2.0, 0.5);
  const int seeds = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    c.seed = static_cast<std::uint64_t>(s);
    const IterationTrace t = run_spa(p, c);
    const double r = dist2(t.records[1]) / dist2(t.records[0]);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum_sq / seeds - mean * mean) / seeds);
  const double bound = 1.0 - 1.0 / (gamma_N(0.5, 2) * 2.0);
  EXPECT_NEAR(bound, 1.0 / 3.0, 1e-15);
  EXPECT_LE(std::abs(mean - bound), 3.0 * se);
}

// Randomized Kaczmarz written directly against the rng stream.
TEST(RunSapTest, RowNormWeightsReproduceKaczmarz) {
  RngStream gen(100);
  const FeasibilityProblem p = random_equality(20, 10, gen, true);
  const Matrix& a = p.linear_structure()->a;
  const Vector& b = p.linear_structure()->b;
  SolverConfig c;
  c.policy = StepsizePolicy::constant(1.0);
  c.max_iters = 1000;
  c.tol_f = 0.0;
  c.record_iterates = true;
  c.compute_distance = false;
  RngStream rng(7);
  const IterationTrace t = run_sap(p, c, rng);

  std::vector<double> cumulative;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    acc += a.row(i).squaredNorm() / a.squaredNorm();
    cumulative.push_back(acc);
  }
  RngStream oracle_rng(7);
  Vector x = Vector::Zero(10);
  ASSERT_EQ(t.iterates.size(), 1001u);
  for (std::size_t k = 0; k < 1000; ++k) {
    ASSERT_LE((t.iterates[k] - x).lpNorm<Eigen::Infinity>(), 1e-12) << k;
    const double u = oracle_rng.uniform() * cumulative.back();
    std::size_t i = 0;
    while (i + 1 < cumulative.size() && u >= cumulative[i]) ++i;
    const Vector ai = a.row(static_cast<Eigen::Index>(i)).transpose();
    x -= (ai.dot(x) - b(static_cast<Eigen::Index>(i))) / ai.squaredNorm() * ai;
  }
}

TEST(RunSapTest, InequalityReproducesClampedResidualIteration) {
  RngStream gen(3);
  const Matrix a = gaussian(15, 6, gen);
  const Vector xs = gen.normal_vector(6);
  Vector slack(15);
  for (Eigen::Index i = 0; i < 15; ++i) slack(i) = gen.uniform();
  const Vector b = a * xs + slack;
  FeasibilityProblem p = make_row_problem(
      a, b, LinearStructure::Kind::kInequality, uniform_weights(15));
  SolverConfig c;
  c.policy = StepsizePolicy::constant(1.0);
  c.max_iters = 300;
  c.tol_f = 0.0;
  c.record_iterates = true;
  c.compute_distance = false;
  c.x0 = Vector::Constant(6, 5.0);
  RngStream rng(9);
  const IterationTrace t = run_sap(p, c, rng);
  RngStream oracle_rng(9);
  Vector x = *c.x0;
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    ASSERT_LE((t.iterates[k] - x).lpNorm<Eigen::Infinity>(), 1e-12) << k;
    const auto i = static_cast<Eigen::Index>(oracle_rng.uniform() * 15.0);
    const Vector ai = a.row(i).transpose();
    x -= std::max(0.0, ai.dot(x) - b(i)) / ai.squaredNorm() * ai;
  }
}

TEST(RunSapTest, DistanceToSolutionNonincreasing) {
  RngStream gen(12);
  const FeasibilityProblem p = random_equality(12, 6, gen, false);
  for (double alpha : {0.5, 1.0, 1.9}) {
    SolverConfig c;
    c.policy = StepsizePolicy::constant(alpha);
    c.max_iters = 200;
    c.x0 = Vector::Constant(6, 3.0);
    for (int s = 0; s < 100; ++s) {
      c.seed = static_cast<std::uint64_t>(s);
      const IterationTrace t = run_spa(p, c);
      for (std::size_t k = 1; k < t.records.size(); ++k) {
        ASSERT_LE(*t.records[k].dist_star,
                  *t.records[k - 1].dist_star * (1.0 + 1e-12) + 1e-14)
            << "alpha " << alpha << " seed " << s << " k " << k;
      }
    }
  }
}

TEST(RunAvpTest, IdentityToyConvergesInOneStep) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.gamma = 0.5;
  const IterationTrace t = run_avp(p, c);
  EXPECT_EQ(t.status, IterationTrace::Status::kConverged);
  EXPECT_EQ(t.iterations, 1);
  EXPECT_DOUBLE_EQ(*t.records[0].alpha, 2.0);
  EXPECT_NEAR((t.final_x - vec2(1, 1)).norm(), 0.0, 1e-15);
}

TEST(RunAvpTest, PerIterateRateOnRandomSystems) {
  RngStream gen(44);
  for (int trial = 0; trial < 5; ++trial) {
    const FeasibilityProblem p = random_equality(15, 8, gen, false);
    const LinearConditioning lc = linear_conditioning(
        p.linear_structure()->a, SketchSampler::coordinate(uniform_weights(15)));
    SolverConfig c;
    c.gamma = lc.gamma;
    c.max_iters = 200;
    c.x0 = gen.normal_vector(8) * 5.0;
    const IterationTrace t = run_avp(p, c);
    const double rate = 1.0 - 1.0 / (lc.gamma * lc.kappa);
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      ASSERT_LE(dist2(t.records[k]),
                rate * dist2(t.records[k - 1]) * (1.0 + 1e-9) + 1e-28);
    }
  }
}

TEST(RunAvpTest, ConstantStepWindowUsesGamma) {
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.gamma = 0.5;
  c.policy = StepsizePolicy::constant(3.0);
  EXPECT_NO_THROW(run_avp(p, c));
  c.policy = StepsizePolicy::constant(4.5);
  EXPECT_THROW(run_avp(p, c), InvalidInputError);
}

TEST(RunBapTest, Examples) {
  FeasibilityProblem one({Hyperplane(vec2(1, 1), 2.0)}, uniform_weights(1));
  SolverConfig c;
  RngStream rng(1);
  const IterationTrace t1 = run_bap(one, BapOrder::kCyclic, c, rng);
  EXPECT_EQ(t1.status, IterationTrace::Status::kConverged);
  EXPECT_EQ(t1.iterations, 1);

  const IterationTrace t2 = run_bap(identity_toy(), BapOrder::kCyclic, c, rng);
  EXPECT_EQ(t2.status, IterationTrace::Status::kConverged);
  EXPECT_EQ(t2.iterations, 2);
  EXPECT_NEAR((t2.final_x - vec2(1, 1)).norm(), 0.0, 1e-15);

  RngStream gen(5);
  const FeasibilityProblem p = random_equality(10, 4, gen, false);
  SolverConfig sap;
  sap.policy = StepsizePolicy::constant(1.0);
  sap.max_iters = 100;
  RngStream r1(33);
  RngStream r2(33);
  const IterationTrace a = run_bap(p, BapOrder::kRandom, sap, r1);
  const IterationTrace b = run_sap(p, sap, r2);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].f_hat, b.records[k].f_hat);
    EXPECT_EQ(a.records[k].dist_exact, b.records[k].dist_exact);
  }
  EXPECT_EQ(a.final_x, b.final_x);
}

TEST(SolverPropertyTest, FeasibleIterateIsFixedPointForEverySolver) {
  RngStream gen(8);
  const FeasibilityProblem p = random_equality(6, 3, gen, false);
  const Vector xs = *p.known_feasible();
  for (const auto& policy :
       {StepsizePolicy::constant(0.3), StepsizePolicy::constant(1.9),
        StepsizePolicy::adaptive(1.0)}) {
    SolverConfig c;
    c.policy = policy;
    c.x0 = xs;
    c.tol_f = 0.0;
    c.max_iters = 5;
    RngStream rng(1);
    // F is at rounding level, so steps may occur; the iterate must not move.
    const IterationTrace t = run_spa(p, c, rng);
    EXPECT_LE((t.final_x - xs).norm(), 1e-13);
    EXPECT_LE((run_avp(p, c).final_x - xs).norm(), 1e-13);
  }
}

TEST(SolverPropertyTest, SameSeedGivesBitwiseIdenticalTrace) {
  RngStream gen(15);
  const FeasibilityProblem p = random_equality(20, 8, gen, false);
  SolverConfig c;
  c.n = 4;
  c.policy = StepsizePolicy::adaptive(1.0);
  c.max_iters = 200;
  c.seed = 99;
  const IterationTrace a = run_spa(p, c);
  const IterationTrace b = run_spa(p, c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].k, b.records[k].k);
    EXPECT_EQ(a.records[k].alpha, b.records[k].alpha);
    EXPECT_EQ(a.records[k].gamma_k, b.records[k].gamma_k);
    EXPECT_EQ(a.records[k].f_hat, b.records[k].f_hat);
    EXPECT_EQ(a.records[k].dist_exact, b.records[k].dist_exact);
  }
  EXPECT_EQ(a.final_x, b.final_x);
}

// E[||x+ - x*||^2 | x] <= ||x - x*||^2 - 2 (2 alpha - alpha^2 gamma_N) F(x),
// checked from several points along one trajectory with 500 seeds each.
TEST(SolverPropertyTest, ExpectedDecreaseOverSeeds) {
  RngStream gen(21);
  const FeasibilityProblem p = random_equality(12, 5, gen, false);
  const Matrix& a = p.linear_structure()->a;
  const double g =
      gamma_linear_system(a, SketchSampler::coordinate(uniform_weights(12)));
  const Vector xs = *p.known_feasible();
  for (int n : {1, 3}) {
    for (const double alpha_scale : {0.5, 1.0, 1.8}) {
      const double gn = gamma_N(g, n);
      const double alpha = alpha_scale / gn;
      Vector x = xs + gen.normal_vector(5) * 2.0;
      for (int step = 0; step < 3; ++step) {
        const double fx = value_F(x, p);
        const double before = (x - xs).squaredNorm();
        double sum = 0.0;
        double sum_sq = 0.0;
        const int seeds = 500;
        Vector next_x = x;
        for (int s = 0; s < seeds; ++s) {
          SolverConfig c;
          c.n = n;
          c.gamma = g;
          c.policy = StepsizePolicy::constant(alpha);
          c.max_iters = 1;
          c.x0 = x;
          c.compute_distance = false;
          c.seed = static_cast<std::uint64_t>(1000 * step + s);
          const IterationTrace t = run_spa(p, c);
          const double after = (t.final_x - xs).squaredNorm();
          sum += after;
          sum_sq += after * after;
          if (s == 0) next_x = t.final_x;
        }
        const double mean = sum / seeds;
        const double se = std::sqrt(std::max(0.0, sum_sq / seeds - mean * mean) / seeds);
        const double bound = before - 2.0 * (2.0 * alpha - alpha * alpha * gn) * fx;
        EXPECT_LE(mean, bound + 3.0 * se)
            << "N " << n << " alpha " << alpha << " step " << step;
        x = next_x;
      }
    }
  }
}

// E[x_{k+1} | x_k] is the AvP step, so the spread of SPA iterates around the
// AvP trajectory shrinks as N grows.
TEST(SolverPropertyTest, LargeMinibatchApproachesAvp) {
  RngStream gen(6);
  const FeasibilityProblem p = random_equality(16, 6, gen, false);
  SolverConfig base;
  base.policy = StepsizePolicy::constant(1.0);
  base.max_iters = 10;
  base.tol_f = 0.0;
  base.x0 = Vector::Constant(6, 4.0);
  base.compute_distance = false;
  const Vector avp = run_avp(p, base).final_x;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 4, 16}) {
    double dev = 0.0;
    for (int s = 0; s < 200; ++s) {
      SolverConfig c = base;
      c.n = n;
      c.seed = static_cast<std::uint64_t>(s);
      dev += (run_spa(p, c).final_x - avp).squaredNorm();
    }
    dev /= 200.0;
    EXPECT_LT(dev, prev) << "N " << n;
    prev = dev;
  }
}

TEST(RunSpaTest, FeasibleMinibatchDoesNotEndRun) {
  // x0 lies on x_1 = 1 but not on x_2 = 1.
  const FeasibilityProblem p = identity_toy();
  SolverConfig c;
  c.policy = StepsizePolicy::constant(1.0);
  c.x0 = vec2(1, 0);
  c.tol_f = 0.0;
  bool saw_idle = false;
  for (std::uint64_t s = 0; s < 20 && !saw_idle; ++s) {
    c.seed = s;
    const IterationTrace t = run_spa(p, c);
    EXPECT_EQ(t.status, IterationTrace::Status::kConverged);
    EXPECT_NEAR((t.final_x - vec2(1, 1)).norm(), 0.0, 1e-15);
    if (t.records.size() > 1 && !t.records[0].alpha.has_value()) {
      saw_idle = true;
      EXPECT_EQ(t.records[0].f_hat, 0.0);
      EXPECT_EQ(t.records[0].dist_exact, 1.0);
    }
  }
  EXPECT_TRUE(saw_idle);
}

TEST(RunSpaTest, NonFiniteIterateRaisesWithTrace) {
  FeasibilityProblem p({Halfspace(vec2(1, 1), 0.0)}, uniform_weights(1));
  SolverConfig c;
  c.x0 = vec2(1e308, 1e308);
  c.compute_distance = false;
  try {
    run_spa(p, c);
    FAIL() << "expected a numerical failure";
  } catch (const SolverNumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumericalFailure);
    EXPECT_FALSE(e.trace().records.empty());
  }
}

TEST(RunSpaTest, AdaptivePolicyConvergesAndRecordsGamma) {
  RngStream gen(17);
  const FeasibilityProblem p = random_equality(30, 10, gen, false);
  for (const auto& policy :
       {StepsizePolicy::adaptive(1.0),
        StepsizePolicy::adaptive(1.0, StepsizePolicy::AdaptiveWeights::kResidualNorm),
        StepsizePolicy::adaptive(1.0, StepsizePolicy::AdaptiveWeights::kUniform,
                                 StepsizePolicy::AdaptiveSource::kExpectation)}) {
    SolverConfig c;
    c.n = 8;
    c.policy = policy;
    c.max_iters = 5000;
    c.tol_f = 1e-20;
    c.seed = 4;
    const IterationTrace t = run_spa(p, c);
    EXPECT_EQ(t.status, IterationTrace::Status::kConverged) << policy.to_string();
    for (const TraceRecord& r : t.records) {
      if (!r.gamma_k) continue;
      EXPECT_GE(*r.gamma_k, 0.0);
      EXPECT_LE(*r.gamma_k, 1.0);
    }
  }
}

}  // namespace
}  // namespace randproj
