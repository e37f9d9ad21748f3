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


#include "randproj/harness.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "Eigen/Core"

namespace randproj {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kConditioningProbes = 200;
constexpr std::size_t kHoffmanProbes = 500;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinity; +inf is written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ConditioningReport fallback_report(std::int64_t n, const std::string& note) {
  ConditioningReport r =
      make_report(1.0, kInf, n, ConditioningMethod::kEmpiricalEstimate);
  r.notes.push_back(note);
  return r;
}

ConditioningReport empirical_report(const FeasibilityProblem& problem,
                                    std::int64_t n, RngStream& rng) {
  const EmpiricalEstimate g =
      estimate_gamma_empirical(problem, kConditioningProbes, rng);
  double gamma = g.value;
  std::vector<std::string> notes;
  if (!(gamma > 0.0)) {
    gamma = 1.0;
    notes.push_back("no infeasible probe for gamma; using gamma = 1");
  }
  gamma = std::min(gamma, 1.0);
  double kappa = kInf;
  if (auto oracle = make_distance_oracle(problem)) {
    const EmpiricalEstimate k =
        estimate_kappa_empirical(problem, kConditioningProbes, *oracle, rng);
    if (k.probes_used > 0) kappa = std::max(k.value, 1.0);
  } else {
    notes.push_back("no distance oracle; kappa not estimated");
  }
  ConditioningReport r =
      make_report(gamma, kappa, n, ConditioningMethod::kEmpiricalEstimate);
  r.sample_count = kConditioningProbes;
  r.notes.push_back("gamma and kappa are probe lower estimates");
  r.notes.insert(r.notes.end(), notes.begin(), notes.end());
  return r;
}

ConditioningReport inequality_report(const ProblemFile& f,
                                     const SketchSampler& sampler,
                                     std::int64_t n, RngStream& rng) {
  double gamma = 1.0;
  std::vector<std::string> notes;
  if (sampler.family_size()) {
    gamma = std::min(1.0, gamma_linear_inequalities(f.a, sampler));
  } else {
    notes.push_back("continuous sketch family; using gamma = 1");
  }
  if (!f.x_star) {
    ConditioningReport r = fallback_report(n, "kappa needs x_star");
    r.gamma = gamma;
    r.gamma_n = gamma_N(gamma, n);
    return r;
  }
  const HoffmanConstants h =
      estimate_hoffman(f.a, f.b, sampler, *f.x_star, kHoffmanProbes, rng);
  const HalfspaceKappa hk = kappa_halfspaces(f.a, sampler, h);
  ConditioningReport r = make_report(gamma, std::max(1.0, hk.applicable()), n,
                                     ConditioningMethod::kEmpiricalEstimate);
  r.sample_count = h.probes_used;
  r.notes.push_back("Hoffman constant is a probe lower estimate");
  if (!hk.note.empty()) r.notes.push_back(hk.note);
  r.notes.insert(r.notes.end(), notes.begin(), notes.end());
  return r;
}

}  // namespace

ConditioningReport conditioning_for(const ProblemFile& file,
                                    const FeasibilityProblem& problem,
                                    std::int64_t n, std::uint64_t seed) {
  RngStream rng(seed);
  try {
    switch (file.kind) {
      case ProblemKind::kLinearEquality: {
        ExpectationOptions eo;
        eo.seed = rng.split(0).next_u64();
        const LinearConditioning c =
            linear_conditioning(file.a, *sketch_sampler(file), eo);
        ConditioningReport r = make_report(
            c.gamma, c.kappa, n,
            c.exact ? ConditioningMethod::kClosedForm
                    : ConditioningMethod::kMonteCarloEstimate);
        r.sample_count = c.sample_count;
        if (!c.exact) {
          r.notes.push_back("gamma std error " + fmt17(c.gamma_std_error) +
                            ", kappa std error " + fmt17(c.kappa_std_error));
        }
        return r;
      }
      case ProblemKind::kLinearInequality:
      case ProblemKind::kHalfspaceList:
        return inequality_report(file, *sketch_sampler(file), n, rng);
      case ProblemKind::kBallIntersection:
      case ProblemKind::kExample1: {
        ConditioningReport r = empirical_report(problem, n, rng);
        if (file.kind == ProblemKind::kExample1) {
          r.notes.push_back(
              "the family is not linearly regular; the kappa estimate grows "
              "without bound as probes approach the origin");
        }
        return r;
      }
      case ProblemKind::kNormalCone:
        if (problem.is_finite()) return empirical_report(problem, n, rng);
        [[fallthrough]];
      case ProblemKind::kSplitFeasibility:
        return fallback_report(
            n, "generated family: gamma = 1 is the universal bound; kappa "
               "not computed");
    }
  } catch (const Error& e) {
    return fallback_report(n, std::string("conditioning failed: ") + e.what());
  }
  return fallback_report(n, "unhandled kind");
}

ConditioningReport with_minibatch(const ConditioningReport& r, std::int64_t n) {
  ConditioningReport out = make_report(r.gamma, r.kappa, n, r.method);
  out.sample_count = r.sample_count;
  out.notes = r.notes;
  return out;
}

json report_json(const ConditioningReport& r) {
  json j;
  j["gamma"] = r.gamma;
  j["kappa"] = finite_or_null(r.kappa);
  j["gamma_n"] = r.gamma_n;
  j["n"] = r.n;
  j["condition_number"] = finite_or_null(r.condition_number);
  j["spa_rate"] = r.spa_rate();
  j["avp_rate"] = r.avp_rate();
  j["method"] = to_string(r.method);
  j["sample_count"] = r.sample_count ? json(*r.sample_count) : json();
  j["notes"] = r.notes;
  return j;
}

std::string report_text(const ConditioningReport& r) {
  std::ostringstream os;
  os << "gamma=" << fmt17(r.gamma) << "\n"
     << "kappa=" << fmt17(r.kappa) << "\n"
     << "n=" << r.n << "\n"
     << "gamma_n=" << fmt17(r.gamma_n) << "\n"
     << "condition_number=" << fmt17(r.condition_number) << "\n"
     << "spa_rate=" << fmt17(r.spa_rate()) << "\n"
     << "avp_rate=" << fmt17(r.avp_rate()) << "\n"
     << "method=" << to_string(r.method) << "\n";
  if (r.sample_count) os << "sample_count=" << *r.sample_count << "\n";
  for (const std::string& note : r.notes) os << "note=" << note << "\n";
  return os.str();
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kSpa: return "spa";
    case Algorithm::kSap: return "sap";
    case Algorithm::kAvp: return "avp";
    case Algorithm::kBap: return "bap";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "spa") return Algorithm::kSpa;
  if (name == "sap") return Algorithm::kSap;
  if (name == "avp") return Algorithm::kAvp;
  if (name == "bap") return Algorithm::kBap;
  throw InvalidInputError("unknown algorithm '" + name + "'");
}

std::string to_string(BapOrder o) {
  return o == BapOrder::kCyclic ? "cyclic" : "random";
}

BapOrder parse_bap_order(const std::string& name) {
  if (name == "cyclic") return BapOrder::kCyclic;
  if (name == "random") return BapOrder::kRandom;
  throw InvalidInputError("unknown B-AP order '" + name + "'");
}

SolveResult run_solve(const FeasibilityProblem& problem,
                      const ConditioningReport& report,
                      const SolveOptions& options) {
  SolveResult out;
  out.conditioning = report;
  SolverConfig config = options.config;
  if (options.gamma_override) {
    out.gamma_used = *options.gamma_override;
    out.gamma_source = "override";
  } else if (report.method == ConditioningMethod::kClosedForm) {
    out.gamma_used = report.gamma;
    out.gamma_source = "closed-form";
  } else {
    out.gamma_used = 1.0;
    out.gamma_source = "default";
  }
  config.gamma = out.gamma_used;
  const auto start = std::chrono::steady_clock::now();
  RngStream rng(config.seed);
  switch (options.algorithm) {
    case Algorithm::kSpa: out.trace = run_spa(problem, config, rng); break;
    case Algorithm::kSap: out.trace = run_sap(problem, config, rng); break;
    case Algorithm::kAvp: out.trace = run_avp(problem, config); break;
    case Algorithm::kBap:
      out.trace = run_bap(problem, options.bap_order, config, rng);
      break;
  }
  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  if (!options.timing) {
    for (TraceRecord& r : out.trace.records) r.elapsed_ns = 0;
  }
  return out;
}

SolveResult run_solve(const ProblemFile& file, const SolveOptions& options) {
  const FeasibilityProblem problem = build_problem(file);
  const ConditioningReport report =
      conditioning_for(file, problem, options.config.n, options.config.seed);
  return run_solve(problem, report, options);
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out,
                     bool timing) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt17(*v) : std::string();
  };
  out << "k,alpha,gamma_k,F_hat,dist_exact,elapsed_ns\n";
  for (const TraceRecord& r : trace.records) {
    out << r.k << ',' << opt(r.alpha) << ',' << opt(r.gamma_k) << ','
        << fmt17(r.f_hat) << ',' << opt(r.dist_exact) << ','
        << (timing ? r.elapsed_ns : 0) << '\n';
  }
}

void write_trace_csv(const IterationTrace& trace, const std::string& path,
                     bool timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path);
  write_trace_csv(trace, out, timing);
}

std::string problem_digest(const ProblemFile& file) {
  const std::string text = to_json(file).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json versions_json() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
        << EIGEN_MINOR_VERSION;
  std::ostringstream nj;
  nj << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
     << NLOHMANN_JSON_VERSION_PATCH;
  return {{"randproj", kVersion},
          {"eigen", eigen.str()},
          {"nlohmann_json", nj.str()},
#if defined(__clang__)
          {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
          {"compiler", std::string("gcc ") + __VERSION__},
#else
          {"compiler", "unknown"},
#endif
          {"manifest_format", 1}};
}

json make_manifest(const ProblemFile& file, const SolveOptions& options,
                   const SolveResult& result, const ManifestPaths& paths) {
  const SolverConfig& c = options.config;
  json j;
  j["format"] = "randproj-manifest";
  j["command"] = "solve";
  j["problem"] = {{"path", paths.problem},
                  {"digest", problem_digest(file)},
                  {"kind", to_string(file.kind)},
                  {"name", file.name},
                  {"dim", file.dim}};
  j["config"] = {{"algorithm", to_string(options.algorithm)},
                 {"bap_order", to_string(options.bap_order)},
                 {"n", c.n},
                 {"stepsize", c.policy.to_string()},
                 {"stepsize_margin", c.policy.margin},
                 {"max_iters", c.max_iters},
                 {"tol", c.tol_f},
                 {"trace_every", c.trace_every},
                 {"gamma", result.gamma_used},
                 {"gamma_source", result.gamma_source},
                 {"timing", options.timing}};
  j["seed"] = c.seed;
  j["versions"] = versions_json();
  j["conditioning"] = report_json(result.conditioning);
  json res = {{"status", to_string(result.trace.status)},
              {"iterations", result.trace.iterations}};
  if (!result.trace.records.empty()) {
    const TraceRecord& last = result.trace.records.back();
    res["final_F_hat"] = last.f_hat;
    res["final_dist"] = last.dist_exact ? json(*last.dist_exact) : json();
  }
  j["result"] = res;
  j["outputs"] = {{"trace", paths.trace}, {"manifest", paths.manifest}};
  j["wall_clock"] = {{"finished_utc", utc_now()},
                     {"seconds", result.wall_seconds}};
  return j;
}

SolveOptions solve_options_from_manifest(const json& m) {
  try {
    const json& c = m.at("config");
    SolveOptions o;
    o.algorithm = parse_algorithm(c.at("algorithm").get<std::string>());
    o.bap_order = parse_bap_order(c.value("bap_order", "random"));
    o.config.n = c.at("n").get<int>();
    o.config.policy = StepsizePolicy::parse(c.at("stepsize").get<std::string>());
    o.config.policy.margin = c.value("stepsize_margin", o.config.policy.margin);
    o.config.max_iters = c.at("max_iters").get<std::int64_t>();
    o.config.tol_f = c.at("tol").get<double>();
    o.config.trace_every = c.value("trace_every", std::int64_t{1});
    o.config.seed = m.at("seed").get<std::uint64_t>();
    o.gamma_override = c.at("gamma").get<double>();
    o.timing = c.value("timing", true);
    return o;
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed manifest: ") + e.what());
  }
}

SolveResult replay_manifest(const json& manifest) {
  std::string path;
  std::string digest;
  try {
    path = manifest.at("problem").at("path").get<std::string>();
    digest = manifest.at("problem").at("digest").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed manifest: ") + e.what());
  }
  const ProblemFile file = read_problem_file(path);
  if (problem_digest(file) != digest) {
    throw InvalidInputError("problem file " + path +
                            " does not match the manifest digest");
  }
  return run_solve(file, solve_options_from_manifest(manifest));
}

// ---------------------------------------------------------------------------

std::vector<VerifyRow> run_verify(const ProblemFile& file,
                                  const VerifyOptions& options) {
  const FeasibilityProblem problem = build_problem(file);
  std::vector<VerifyRow> rows;
  auto skip = [&rows](const std::string& name, const std::string& note) {
    VerifyRow row;
    row.result.name = name;
    row.result.worst_slack = 0.0;
    row.skipped = true;
    row.note = note;
    rows.push_back(std::move(row));
  };
  static const char* kNames[] = {
      "sandwich",           "operator-contraction", "firm-nonexpansive",
      "gradient-lipschitz", "relation-identity",    "jensen-chain",
      "objective-zero-set", "gradient-finite-difference"};
  if (!problem.is_finite()) {
    for (const char* name : kNames) skip(name, "generated family");
    return rows;
  }
  if (!problem.solution_point() && !problem.known_feasible()) {
    for (const char* name : kNames) {
      skip(name, "no feasible point to center probes");
    }
    return rows;
  }
  RngStream rng(options.seed);
  const ConditioningReport report =
      conditioning_for(file, problem, 1, rng.split(0).next_u64());
  RngStream probe_rng = rng.split(1);
  const auto probes = default_probes(problem, options.probes, probe_rng);
  const auto pairs = default_probe_pairs(problem, options.probes, probe_rng);
  const bool exact = report.method == ConditioningMethod::kClosedForm;
  const auto oracle = make_distance_oracle(problem);

  auto push = [&rows](TheoremCheckResult r, std::string note = {}) {
    rows.push_back({std::move(r), false, std::move(note)});
  };
  if (exact && oracle && std::isfinite(report.kappa)) {
    push(check_sandwich(problem, report.kappa, report.gamma, probes, *oracle));
    push(check_operator_contraction(problem, report.kappa, report.gamma, probes,
                                    *oracle));
  } else {
    const std::string why =
        !oracle ? "no distance oracle" : "constants are estimates";
    skip(kNames[0], why);
    skip(kNames[1], why);
  }
  push(check_firm_nonexpansive(problem, pairs));
  push(check_gradient_lipschitz(problem, pairs));
  push(check_relation_identity(problem, probes));
  push(check_jensen_chain(problem, exact ? report.gamma : 1.0, probes),
       exact ? "" : "gamma = 1");
  std::vector<Vector> feasible;
  if (problem.known_feasible()) feasible.push_back(*problem.known_feasible());
  if (problem.solution_point()) feasible.push_back(*problem.solution_point());
  push(check_objective_zero_set(problem, probes, feasible));
  push(check_gradient_finite_difference(problem, probes));
  return rows;
}

bool all_pass(const std::vector<VerifyRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) {
    return r.skipped || r.result.holds;
  });
}

namespace {

std::string verdict(const VerifyRow& r) {
  return r.skipped ? "SKIP" : (r.result.holds ? "PASS" : "FAIL");
}

}  // namespace

void write_verify_csv(const std::vector<VerifyRow>& rows, std::ostream& out) {
  out << "name,status,worst_slack,probes,tolerance,note\n";
  for (const VerifyRow& r : rows) {
    out << r.result.name << ',' << verdict(r) << ','
        << fmt17(r.result.worst_slack) << ',' << r.result.probe_count << ','
        << fmt17(r.result.tolerance) << ',' << r.note << '\n';
  }
}

void write_verify_text(const std::vector<VerifyRow>& rows, std::ostream& out) {
  std::size_t w = 4;
  for (const VerifyRow& r : rows) w = std::max(w, r.result.name.size());
  out << std::left << std::setw(static_cast<int>(w)) << "name" << "  status"
      << "  " << std::setw(24) << "worst_slack" << "  probes\n";
  for (const VerifyRow& r : rows) {
    out << std::left << std::setw(static_cast<int>(w)) << r.result.name << "  "
        << std::setw(6) << verdict(r) << "  " << std::setw(24)
        << fmt17(r.result.worst_slack) << "  " << r.result.probe_count;
    if (!r.note.empty()) out << "  (" << r.note << ")";
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

std::optional<double> theoretical_rate(const BenchmarkCell& cell,
                                       const ConditioningReport& base) {
  if (!std::isfinite(base.kappa)) return 1.0;
  switch (cell.algorithm) {
    case Algorithm::kAvp: {
      if (cell.policy.kind == StepsizePolicy::Kind::kOptimalFixed) {
        return 1.0 - 1.0 / (base.gamma * base.kappa);
      }
      if (cell.policy.kind == StepsizePolicy::Kind::kAdaptive) return std::nullopt;
      const double a = cell.policy.alpha;
      const double delta = std::min(a, 2.0 / base.gamma - a);
      return 1.0 - delta * delta * base.gamma / base.kappa;
    }
    case Algorithm::kBap: {
      if (cell.bap_order == BapOrder::kCyclic) return std::nullopt;
      return 1.0 - 1.0 / base.kappa;
    }
    case Algorithm::kSap:
    case Algorithm::kSpa: {
      const int n = cell.algorithm == Algorithm::kSap ? 1 : cell.n;
      const double gn = gamma_N(base.gamma, n);
      switch (cell.policy.kind) {
        case StepsizePolicy::Kind::kOptimalFixed:
          return 1.0 - 1.0 / (gn * base.kappa);
        case StepsizePolicy::Kind::kConstant: {
          const double a = cell.policy.alpha;
          const double delta = std::min(a, 2.0 / gn - a);
          return 1.0 - delta * delta * gn / base.kappa;
        }
        case StepsizePolicy::Kind::kAdaptive:
          return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

namespace {

std::string slug(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') {
      c = '_';
    }
  }
  return s;
}

struct CellOutcome {
  bool ran = false;
  bool failed = false;
  bool converged = false;
  std::int64_t iterations = 0;
  std::optional<double> rate;
  std::string error;
  std::string manifest;
};

std::string opt_text(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string();
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkSpec& spec) {
  if (spec.grid.empty()) throw InvalidInputError("benchmark grid is empty");
  if (spec.problems.empty()) throw InvalidInputError("benchmark has no problems");
  if (spec.replicates < 1) throw InvalidInputError("replicates must be >= 1");
  if (spec.out_dir.empty()) throw InvalidInputError("benchmark needs out_dir");
  namespace fs = std::filesystem;
  const fs::path root(spec.out_dir);
  const fs::path cells = root / "cells";
  fs::create_directories(cells);

  const std::size_t np = spec.problems.size();
  const std::size_t ng = spec.grid.size();
  const std::size_t nr = static_cast<std::size_t>(spec.replicates);

  struct Prepared {
    std::optional<FeasibilityProblem> problem;
    ConditioningReport base;
    std::string label;
    std::string error;
  };
  std::vector<Prepared> prepared(np);
  const RngStream master(spec.master_seed);
  for (std::size_t p = 0; p < np; ++p) {
    const ProblemFile& f = spec.problems[p].file;
    prepared[p].label = f.name.empty() ? to_string(f.kind) : f.name;
    try {
      prepared[p].problem = build_problem(f);
      prepared[p].base = conditioning_for(
          f, *prepared[p].problem, 1,
          master.split(std::numeric_limits<std::uint64_t>::max() - p)
              .next_u64());
    } catch (const Error& e) {
      prepared[p].error = e.what();
    }
  }

  const std::size_t total = np * ng * nr;
  std::vector<CellOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t c = next++; c < total; c = next++) {
      const std::size_t p = c / (ng * nr);
      const std::size_t g = (c / nr) % ng;
      const std::size_t r = c % nr;
      CellOutcome& out = outcomes[c];
      out.ran = true;
      if (!prepared[p].problem) {
        out.failed = true;
        out.error = prepared[p].error;
        continue;
      }
      const BenchmarkCell& cell = spec.grid[g];
      SolveOptions o;
      o.algorithm = cell.algorithm;
      o.bap_order = cell.bap_order;
      o.config.n = cell.algorithm == Algorithm::kSpa ? cell.n : 1;
      o.config.policy = cell.policy;
      o.config.max_iters = spec.max_iters;
      o.config.tol_f = spec.tol_f;
      o.config.trace_every = spec.trace_every;
      o.config.seed = master.split(c).next_u64();
      o.timing = spec.timing;
      std::ostringstream stem;
      stem << std::setw(4) << std::setfill('0') << c << '_'
           << slug(prepared[p].label) << '_' << to_string(cell.algorithm)
           << "_n" << o.config.n << '_' << slug(cell.policy.to_string()) << "_r"
           << r;
      const fs::path trace_path = cells / (stem.str() + ".csv");
      const fs::path manifest_path = cells / (stem.str() + ".manifest.json");
      try {
        const ConditioningReport report =
            with_minibatch(prepared[p].base, o.config.n);
        const SolveResult res =
            run_solve(*prepared[p].problem, report, o);
        write_trace_csv(res.trace, trace_path.string(), spec.timing);
        json m = make_manifest(
            spec.problems[p].file, o, res,
            {spec.problems[p].path, trace_path.string(), manifest_path.string()});
        m["benchmark"] = {{"master_seed", spec.master_seed},
                          {"cell_index", c},
                          {"replicate", r}};
        std::ofstream(manifest_path) << m.dump(2) << '\n';
        out.manifest = manifest_path.string();
        out.converged = res.trace.status == IterationTrace::Status::kConverged;
        out.iterations = res.trace.iterations;
        const double rate_gn = cell.algorithm == Algorithm::kAvp
                                   ? report.gamma
                                   : report.gamma_n;
        const RateFit fit = fit_rates(res.trace, report.kappa, rate_gn);
        if (!fit.factors.empty()) out.rate = fit.geometric_mean;
      } catch (const Error& e) {
        out.failed = true;
        out.error = e.what();
      }
    }
  };
  unsigned workers = spec.workers != 0 ? spec.workers
                                       : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
  }

  BenchmarkResult result;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t g = 0; g < ng; ++g) {
      const BenchmarkCell& cell = spec.grid[g];
      BenchmarkRow row;
      row.problem = prepared[p].label;
      row.algorithm = to_string(cell.algorithm);
      if (cell.algorithm == Algorithm::kBap) {
        row.algorithm += "-" + to_string(cell.bap_order);
      }
      row.n = cell.algorithm == Algorithm::kSpa ? cell.n : 1;
      row.stepsize = cell.algorithm == Algorithm::kBap ? "const:1"
                                                       : cell.policy.to_string();
      double iters = 0.0;
      double rate = 0.0;
      int rated = 0;
      for (std::size_t r = 0; r < nr; ++r) {
        const CellOutcome& o = outcomes[(p * ng + g) * nr + r];
        ++row.runs;
        if (o.failed) {
          ++row.failed;
          if (row.errors.empty()) row.errors = o.error;
          continue;
        }
        result.manifests.push_back(o.manifest);
        if (o.converged) {
          ++row.converged;
          iters += static_cast<double>(o.iterations);
        }
        if (o.rate) {
          rate += *o.rate;
          ++rated;
        }
      }
      if (row.converged > 0) row.mean_iterations = iters / row.converged;
      if (rated > 0) row.empirical_rate = rate / rated;
      if (prepared[p].problem) {
        try {
          row.theoretical_rate = theoretical_rate(cell, prepared[p].base);
        } catch (const Error&) {
          row.theoretical_rate.reset();
        }
      }
      result.rows.push_back(std::move(row));
    }
  }
  result.summary_csv = (root / "summary.csv").string();
  result.summary_text = (root / "summary.txt").string();
  {
    std::ofstream csv(result.summary_csv);
    write_summary_csv(result.rows, csv);
    std::ofstream txt(result.summary_text);
    write_summary_text(result.rows, txt);
  }
  return result;
}

namespace {

std::vector<std::vector<std::string>> summary_cells(
    const std::vector<BenchmarkRow>& rows) {
  std::vector<std::vector<std::string>> out;
  out.push_back({"problem", "algorithm", "n", "stepsize", "runs", "converged",
                 "failed", "mean_iterations", "empirical_rate",
                 "theoretical_rate", "errors"});
  for (const BenchmarkRow& r : rows) {
    out.push_back({r.problem, r.algorithm, std::to_string(r.n), r.stepsize,
                   std::to_string(r.runs), std::to_string(r.converged),
                   std::to_string(r.failed), opt_text(r.mean_iterations),
                   opt_text(r.empirical_rate), opt_text(r.theoretical_rate),
                   r.errors});
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_summary_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
  for (const auto& line : summary_cells(rows)) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << (i ? "," : "") << csv_field(line[i]);
    }
    out << '\n';
  }
}

void write_summary_text(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
  const auto cells = summary_cells(rows);
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], line[i].size());
    }
  }
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << (i ? "  " : "") << std::left
          << std::setw(static_cast<int>(width[i])) << line[i];
    }
    out << '\n';
  }
}

}  // namespace randproj
