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


// Experiment plumbing: conditioning and verification of problem files,
// single solves with manifests and trace CSVs, and benchmark grids.

#ifndef RANDPROJ_HARNESS_H_
#define RANDPROJ_HARNESS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "randproj/conditioning.h"
#include "randproj/diagnostics.h"
#include "randproj/problem_file.h"
#include "randproj/solvers.h"

namespace randproj {

inline constexpr const char* kVersion = "0.1.0";

// gamma and kappa of a problem file for minibatch size n. Linear equality
// kinds use the closed form (Monte Carlo for non-enumerable sketches);
// inequality kinds pair the exact gamma with a Hoffman estimate around x*;
// the remaining finite kinds use empirical estimates. Generated families get
// gamma = 1 and kappa = +inf. Never throws for a valid file: failures become
// notes with kappa = +inf.
ConditioningReport conditioning_for(const ProblemFile& file,
                                    const FeasibilityProblem& problem,
                                    std::int64_t n, std::uint64_t seed);

// Same constants, re-evaluated for another minibatch size.
ConditioningReport with_minibatch(const ConditioningReport& r, std::int64_t n);

nlohmann::json report_json(const ConditioningReport& r);
// key=value lines.
std::string report_text(const ConditioningReport& r);

enum class Algorithm { kSpa, kSap, kAvp, kBap };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
std::string to_string(BapOrder o);
BapOrder parse_bap_order(const std::string& name);

struct SolveOptions {
  Algorithm algorithm = Algorithm::kSpa;
  BapOrder bap_order = BapOrder::kRandom;
  // n, policy, max_iters, tol_f, seed and trace_every are honored. gamma is
  // filled by run_solve unless gamma_override is set.
  SolverConfig config;
  std::optional<double> gamma_override;
  // Stepsizes use the report gamma only when it is exact; estimates fall
  // back to the always-valid gamma = 1.
  bool timing = true;  // elapsed_ns column; 0 when disabled
};

struct SolveResult {
  IterationTrace trace;
  ConditioningReport conditioning;
  double gamma_used = 1.0;
  std::string gamma_source;
  double wall_seconds = 0.0;
};

// Throws InvalidInputError for invalid options (AvP on generated families,
// stepsize outside the window, ...) and SolverNumericalError on divergence.
SolveResult run_solve(const ProblemFile& file, const SolveOptions& options);

// Solve with a precomputed report (benchmark cells share one per problem).
SolveResult run_solve(const FeasibilityProblem& problem,
                      const ConditioningReport& report,
                      const SolveOptions& options);

// Columns k, alpha, gamma_k, F_hat, dist_exact, elapsed_ns; doubles with 17
// significant digits, empty cells for absent values.
void write_trace_csv(const IterationTrace& trace, std::ostream& out,
                     bool timing = true);
void write_trace_csv(const IterationTrace& trace, const std::string& path,
                     bool timing = true);

// FNV-1a of the canonical JSON form of the problem.
std::string problem_digest(const ProblemFile& file);

struct ManifestPaths {
  std::string problem;
  std::string trace;
  std::string manifest;
};

nlohmann::json make_manifest(const ProblemFile& file, const SolveOptions& options,
                             const SolveResult& result,
                             const ManifestPaths& paths);

// Options recorded in a manifest. Throws InvalidInputError on a malformed
// manifest.
SolveOptions solve_options_from_manifest(const nlohmann::json& manifest);

// Re-runs a manifest: reads the problem it names, checks the digest and
// solves with the recorded options. Throws InvalidInputError on a digest
// mismatch.
SolveResult replay_manifest(const nlohmann::json& manifest);

nlohmann::json versions_json();

// ---------------------------------------------------------------------------
// Verification suite.

struct VerifyRow {
  TheoremCheckResult result;
  bool skipped = false;
  std::string note;
};

struct VerifyOptions {
  std::size_t probes = 1000;
  std::uint64_t seed = 0;
};

std::vector<VerifyRow> run_verify(const ProblemFile& file,
                                  const VerifyOptions& options);
bool all_pass(const std::vector<VerifyRow>& rows);
void write_verify_csv(const std::vector<VerifyRow>& rows, std::ostream& out);
void write_verify_text(const std::vector<VerifyRow>& rows, std::ostream& out);

// ---------------------------------------------------------------------------
// Benchmarks.

struct BenchmarkCell {
  Algorithm algorithm = Algorithm::kSpa;
  BapOrder bap_order = BapOrder::kRandom;
  int n = 1;
  StepsizePolicy policy;
};

struct BenchmarkProblem {
  std::string path;  // recorded in manifests; may be empty
  ProblemFile file;
};

struct BenchmarkSpec {
  std::vector<BenchmarkProblem> problems;
  std::vector<BenchmarkCell> grid;
  std::uint64_t master_seed = 0;
  int replicates = 1;
  std::int64_t max_iters = 1000;
  double tol_f = 1e-20;
  std::int64_t trace_every = 1;
  std::string out_dir;
  unsigned workers = 0;  // 0: hardware concurrency
  bool timing = true;
};

// One summary row per (problem, grid cell).
struct BenchmarkRow {
  std::string problem;
  std::string algorithm;
  int n = 1;
  std::string stepsize;
  int runs = 0;
  int converged = 0;
  int failed = 0;
  std::optional<double> mean_iterations;  // over converged runs
  std::optional<double> empirical_rate;   // mean geometric per-step factor
  std::optional<double> theoretical_rate;
  std::string errors;  // first failure message
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<std::string> manifests;
  std::string summary_csv;
  std::string summary_text;
};

// Cell c = (problem, grid entry, replicate) in row-major order runs with
// seed RngStream(master_seed).split(c).next_u64(). Writes one trace CSV and
// one manifest per cell under out_dir/cells, plus summary.csv and
// summary.txt. Throws InvalidInputError for an empty grid or problem list;
// failed cells are recorded and the run continues.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec);

// Theoretical per-step factor for a cell: 1 - 1/(gamma kappa) for AvP,
// 1 - 1/(gamma_N kappa) for the optimal step, 1 - delta^2 gamma_N / kappa
// with delta = min(alpha, 2/gamma_N - alpha) for constant steps; nullopt
// for cyclic B-AP and adaptive steps.
std::optional<double> theoretical_rate(const BenchmarkCell& cell,
                                       const ConditioningReport& base);

void write_summary_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out);
void write_summary_text(const std::vector<BenchmarkRow>& rows, std::ostream& out);

}  // namespace randproj

#endif  // RANDPROJ_HARNESS_H_
