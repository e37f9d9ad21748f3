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


// randproj command-line harness.
//
//   randproj generate     --kind KIND [--m M] [--n N] ...     problem file
//   randproj solve        --problem FILE [--algorithm A] ...  trace + manifest
//   randproj conditioning --problem FILE [--n N]              gamma, kappa
//   randproj verify       --problem FILE [--probes K]         theorem checks
//   randproj benchmark    --problem FILE... --out DIR ...     grid of solves
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 verification
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "randproj/harness.h"
#include "randproj/problem_file.h"

namespace randproj {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Format { kText, kCsv };

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  Format format = Format::kText;
};

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Prints ordered key/value pairs as key=value lines or a two-row CSV.
void emit(const std::vector<std::pair<std::string, std::string>>& kv,
          Format format) {
  if (format == Format::kText) {
    for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
    return;
  }
  for (std::size_t i = 0; i < kv.size(); ++i) {
    std::cout << (i ? "," : "") << kv[i].first;
  }
  std::cout << '\n';
  for (std::size_t i = 0; i < kv.size(); ++i) {
    std::cout << (i ? "," : "") << kv[i].second;
  }
  std::cout << '\n';
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::int64_t m = 10;
  std::int64_t n = 5;
  double slack = 1.0;
  double margin = 0.5;
  double power = 2.0;
  bool normalize_rows = false;
  std::string distribution = "uniform";
  std::int64_t block = 1;
  std::string probe = "iterate";
  double probe_scale = 1.0;
  std::string name;
};

int cmd_generate(const GenerateArgs& a, const Globals& g) {
  RngStream rng(g.seed);
  ProblemFile f;
  switch (parse_problem_kind(a.kind)) {
    case ProblemKind::kLinearEquality:
      f = generate_linear_equality(a.m, a.n, rng, a.normalize_rows);
      break;
    case ProblemKind::kLinearInequality:
      f = generate_linear_inequality(a.m, a.n, a.slack, rng);
      break;
    case ProblemKind::kHalfspaceList:
      f = generate_linear_inequality(a.m, a.n, a.slack, rng);
      f.kind = ProblemKind::kHalfspaceList;
      break;
    case ProblemKind::kBallIntersection:
      f = generate_ball_intersection(a.m, a.n, a.margin, rng);
      break;
    case ProblemKind::kSplitFeasibility:
      f = generate_split_feasibility(a.m, a.n, rng);
      break;
    case ProblemKind::kNormalCone:
      f = generate_normal_cone(a.n, rng);
      break;
    case ProblemKind::kExample1:
      f = generate_example1(a.power);
      break;
  }
  f.name = a.name;
  if (a.distribution == "uniform") {
    f.distribution.kind = DistributionSpec::Kind::kUniform;
  } else if (a.distribution == "row-norm") {
    f.distribution.kind = DistributionSpec::Kind::kRowNorm;
  } else if (a.distribution == "row-subset") {
    f.distribution.kind = DistributionSpec::Kind::kRowSubset;
  } else if (a.distribution == "aggregate") {
    f.distribution.kind = DistributionSpec::Kind::kAggregate;
  } else {
    throw InvalidInputError("unknown distribution '" + a.distribution + "'");
  }
  f.distribution.block = a.block;
  if (a.probe == "iterate") {
    f.probe_mode = ProbeMode::kIterate;
  } else if (a.probe == "gaussian") {
    f.probe_mode = ProbeMode::kGaussian;
  } else {
    throw InvalidInputError("probe mode must be iterate or gaussian");
  }
  f.probe_scale = a.probe_scale;
  validate(f);
  if (g.out.empty()) {
    std::cout << to_json(f).dump(2) << '\n';
  } else {
    write_problem_file(f, g.out);
  }
  return 0;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string problem;
  std::string replay;
  std::string algorithm = "spa";
  std::string order = "random";
  int n = 1;
  std::string stepsize = "optimal";
  std::int64_t max_iters = 1000;
  double tol = 1e-20;
  std::int64_t trace_every = 1;
  std::string trace;
  std::optional<double> gamma;
  bool no_timing = false;
};

int cmd_solve(const SolveArgs& a, const Globals& g) {
  ProblemFile file;
  SolveOptions o;
  std::string problem_path = a.problem;
  if (!a.replay.empty()) {
    std::ifstream in(a.replay);
    if (!in) throw InvalidInputError("cannot open manifest " + a.replay);
    json m;
    try {
      in >> m;
    } catch (const json::exception& e) {
      throw InvalidInputError(std::string("cannot parse manifest: ") + e.what());
    }
    o = solve_options_from_manifest(m);
    problem_path = m.at("problem").at("path").get<std::string>();
    file = read_problem_file(problem_path);
    if (problem_digest(file) != m.at("problem").at("digest").get<std::string>()) {
      throw InvalidInputError("problem file does not match the manifest digest");
    }
  } else {
    if (a.problem.empty()) throw InvalidInputError("solve needs --problem");
    file = read_problem_file(a.problem);
    o.algorithm = parse_algorithm(a.algorithm);
    o.bap_order = parse_bap_order(a.order);
    o.config.n = o.algorithm == Algorithm::kSpa ? a.n : 1;
    o.config.policy = StepsizePolicy::parse(a.stepsize);
    o.config.max_iters = a.max_iters;
    o.config.tol_f = a.tol;
    o.config.trace_every = a.trace_every;
    o.config.seed = g.seed;
    o.gamma_override = a.gamma;
    o.timing = !a.no_timing;
  }
  fs::path trace_path = a.trace;
  fs::path manifest_path;
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    if (trace_path.empty()) trace_path = fs::path(g.out) / "trace.csv";
    manifest_path = fs::path(g.out) / "manifest.json";
  } else if (!trace_path.empty()) {
    manifest_path = trace_path;
    manifest_path.replace_extension(".manifest.json");
  }
  SolveResult res;
  try {
    res = run_solve(file, o);
  } catch (const SolverNumericalError& e) {
    if (!trace_path.empty()) write_trace_csv(e.trace(), trace_path.string(), o.timing);
    throw;
  }
  if (!trace_path.empty()) write_trace_csv(res.trace, trace_path.string(), o.timing);
  if (!manifest_path.empty()) {
    write_json(make_manifest(file, o, res,
                             {problem_path, trace_path.string(),
                              manifest_path.string()}),
               manifest_path);
  }
  const TraceRecord& last = res.trace.records.back();
  emit({{"algorithm", res.trace.algorithm},
        {"status", to_string(res.trace.status)},
        {"iterations", std::to_string(res.trace.iterations)},
        {"F_hat", num(last.f_hat)},
        {"dist_exact", last.dist_exact ? num(*last.dist_exact) : ""},
        {"gamma", num(res.gamma_used)},
        {"gamma_source", res.gamma_source},
        {"seed", std::to_string(o.config.seed)},
        {"trace", trace_path.string()},
        {"manifest", manifest_path.string()}},
       g.format);
  return 0;
}

// --- conditioning -----------------------------------------------------------

int cmd_conditioning(const std::string& problem_path, int n, const Globals& g) {
  const ProblemFile file = read_problem_file(problem_path);
  const FeasibilityProblem problem = build_problem(file);
  const ConditioningReport r = conditioning_for(file, problem, n, g.seed);
  if (g.format == Format::kText) {
    std::cout << report_text(r);
  } else {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"gamma", num(r.gamma)},
        {"kappa", num(r.kappa)},
        {"n", std::to_string(r.n)},
        {"gamma_n", num(r.gamma_n)},
        {"condition_number", num(r.condition_number)},
        {"spa_rate", num(r.spa_rate())},
        {"avp_rate", num(r.avp_rate())},
        {"method", to_string(r.method)}};
    emit(kv, g.format);
  }
  if (!g.out.empty()) {
    json m = {{"format", "randproj-manifest"},
              {"command", "conditioning"},
              {"problem",
               {{"path", problem_path}, {"digest", problem_digest(file)}}},
              {"seed", g.seed},
              {"versions", versions_json()},
              {"conditioning", report_json(r)}};
    write_json(m, fs::path(g.out) / "conditioning.json");
  }
  return 0;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const std::string& problem_path, std::size_t probes,
               const Globals& g) {
  const ProblemFile file = read_problem_file(problem_path);
  const std::vector<VerifyRow> rows = run_verify(file, {probes, g.seed});
  if (g.format == Format::kText) {
    write_verify_text(rows, std::cout);
  } else {
    write_verify_csv(rows, std::cout);
  }
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    std::ofstream csv(dir / "verify.csv");
    write_verify_csv(rows, csv);
    std::ofstream txt(dir / "verify.txt");
    write_verify_text(rows, txt);
    json checks = json::array();
    for (const VerifyRow& r : rows) {
      checks.push_back({{"name", r.result.name},
                        {"status", r.skipped ? "skip"
                                             : (r.result.holds ? "pass" : "fail")},
                        {"worst_slack", r.result.worst_slack},
                        {"probes", r.result.probe_count},
                        {"note", r.note}});
    }
    write_json({{"format", "randproj-manifest"},
                {"command", "verify"},
                {"problem",
                 {{"path", problem_path}, {"digest", problem_digest(file)}}},
                {"seed", g.seed},
                {"probes", probes},
                {"versions", versions_json()},
                {"checks", checks}},
               dir / "verify.manifest.json");
  }
  return all_pass(rows) ? 0 : exit_code_for(ErrorKind::kVerificationFailure);
}

// --- benchmark --------------------------------------------------------------

struct BenchmarkArgs {
  std::vector<std::string> problems;
  std::vector<std::string> algorithms = {"sap", "avp"};
  std::vector<int> ns = {1};
  std::vector<std::string> stepsizes = {"optimal"};
  int replicates = 1;
  std::int64_t max_iters = 1000;
  double tol = 1e-20;
  std::int64_t trace_every = 1;
  unsigned workers = 0;
  bool no_timing = false;
};

int cmd_benchmark(const BenchmarkArgs& a, const Globals& g) {
  if (g.out.empty()) throw InvalidInputError("benchmark needs --out DIR");
  BenchmarkSpec spec;
  for (const std::string& p : a.problems) {
    spec.problems.push_back({p, read_problem_file(p)});
    if (spec.problems.back().file.name.empty()) {
      spec.problems.back().file.name = fs::path(p).stem().string();
    }
  }
  for (const std::string& name : a.algorithms) {
    if (name == "bap" || name == "bap-random" || name == "bap-cyclic") {
      spec.grid.push_back({Algorithm::kBap,
                           name == "bap-cyclic" ? BapOrder::kCyclic
                                                : BapOrder::kRandom,
                           1, StepsizePolicy::constant(1.0)});
      continue;
    }
    const Algorithm alg = parse_algorithm(name);
    for (const std::string& s : a.stepsizes) {
      const StepsizePolicy policy = StepsizePolicy::parse(s);
      if (alg == Algorithm::kSpa) {
        for (int n : a.ns) spec.grid.push_back({alg, BapOrder::kRandom, n, policy});
      } else {
        spec.grid.push_back({alg, BapOrder::kRandom, 1, policy});
      }
    }
  }
  spec.master_seed = g.seed;
  spec.replicates = a.replicates;
  spec.max_iters = a.max_iters;
  spec.tol_f = a.tol;
  spec.trace_every = a.trace_every;
  spec.out_dir = g.out;
  spec.workers = a.workers;
  spec.timing = !a.no_timing;
  const BenchmarkResult r = run_benchmark(spec);
  if (g.format == Format::kText) {
    write_summary_text(r.rows, std::cout);
  } else {
    write_summary_csv(r.rows, std::cout);
  }
  int failed = 0;
  for (const BenchmarkRow& row : r.rows) failed += row.failed;
  if (failed > 0) {
    std::cerr << failed << " benchmark cell(s) failed; see " << r.summary_csv
              << '\n';
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Randomized projection methods for convex feasibility"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string format = "text";
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out,
                 "Output file (generate) or directory (other commands)");
  app.add_option("--format", format, "Stdout format")
      ->check(CLI::IsMember({"text", "csv"}));

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a generated problem file");
  gen->add_option("--kind", ga.kind, "Problem kind")->required();
  gen->add_option("--m", ga.m, "Rows, balls or range dimension");
  gen->add_option("--n", ga.n, "Dimension");
  gen->add_option("--slack", ga.slack, "Inequality slack scale");
  gen->add_option("--margin", ga.margin, "Ball radius margin");
  gen->add_option("--p", ga.power, "Example 1 power");
  gen->add_flag("--normalize-rows", ga.normalize_rows, "Unit-norm rows");
  gen->add_option("--distribution", ga.distribution,
                  "uniform, row-norm, row-subset or aggregate");
  gen->add_option("--block", ga.block, "Sketch block size");
  gen->add_option("--probe", ga.probe, "iterate or gaussian");
  gen->add_option("--probe-scale", ga.probe_scale, "Gaussian probe scale");
  gen->add_option("--name", ga.name, "Problem name");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run one solver");
  solve->add_option("--problem", sa.problem, "Problem file");
  solve->add_option("--replay", sa.replay, "Re-run a solve manifest");
  solve->add_option("--algorithm", sa.algorithm, "spa, sap, avp or bap")
      ->check(CLI::IsMember({"spa", "sap", "avp", "bap"}));
  solve->add_option("--order", sa.order, "B-AP order: random or cyclic");
  solve->add_option("--n", sa.n, "Minibatch size");
  solve->add_option("--stepsize", sa.stepsize,
                    "const:x, optimal or adaptive:x[:residual][:expectation]");
  solve->add_option("--max-iters", sa.max_iters, "Iteration budget");
  solve->add_option("--tol", sa.tol, "Stop when F falls to this value");
  solve->add_option("--trace-every", sa.trace_every, "Trace stride");
  solve->add_option("--trace", sa.trace, "Trace CSV path");
  solve->add_option("--gamma", sa.gamma, "Override gamma for the stepsize");
  solve->add_flag("--no-timing", sa.no_timing, "Write elapsed_ns as 0");

  std::string cond_problem;
  int cond_n = 1;
  auto* cond = app.add_subcommand("conditioning", "Report gamma and kappa");
  cond->add_option("--problem", cond_problem, "Problem file")->required();
  cond->add_option("--n", cond_n, "Minibatch size");

  std::string verify_problem;
  std::size_t probes = 1000;
  auto* verify = app.add_subcommand("verify", "Run the theorem checks");
  verify->add_option("--problem", verify_problem, "Problem file")->required();
  verify->add_option("--probes", probes, "Probe count");

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Run an algorithm grid");
  bench->add_option("--problem", ba.problems, "Problem files")->required();
  bench->add_option("--algorithms", ba.algorithms,
                    "spa, sap, avp, bap, bap-cyclic")
      ->delimiter(',');
  bench->add_option("--ns", ba.ns, "Minibatch sizes for spa")->delimiter(',');
  bench->add_option("--stepsizes", ba.stepsizes, "Stepsize policies")
      ->delimiter(',');
  bench->add_option("--replicates", ba.replicates, "Runs per cell");
  bench->add_option("--max-iters", ba.max_iters, "Iteration budget");
  bench->add_option("--tol", ba.tol, "Stop when F falls to this value");
  bench->add_option("--trace-every", ba.trace_every, "Trace stride");
  bench->add_option("--workers", ba.workers, "Worker threads (0: all cores)");
  bench->add_flag("--no-timing", ba.no_timing, "Write elapsed_ns as 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorKind::kInvalidInput);
  }
  g.format = format == "csv" ? Format::kCsv : Format::kText;
  try {
    if (gen->parsed()) return cmd_generate(ga, g);
    if (solve->parsed()) return cmd_solve(sa, g);
    if (cond->parsed()) return cmd_conditioning(cond_problem, cond_n, g);
    if (verify->parsed()) return cmd_verify(verify_problem, probes, g);
    if (bench->parsed()) return cmd_benchmark(ba, g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(ErrorKind::kInvalidInput);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(ErrorKind::kInvalidInput);
  }
  return exit_code_for(ErrorKind::kInvalidInput);
}

}  // namespace
}  // namespace randproj

int main(int argc, char** argv) { return randproj::run(argc, argv); }
