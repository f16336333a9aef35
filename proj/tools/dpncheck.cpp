#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dpncheck/model_io.hpp"
#include "dpncheck/pipeline.hpp"

namespace {

// One exit code per error class.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolverUnavailable = 3;
constexpr int kExitTimeouts = 4;
constexpr int kExitInternal = 5;

namespace fs = std::filesystem;

std::string find_on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return "";
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    fs::path cand = fs::path(dir) / name;
    std::error_code ec;
    if (fs::exists(cand, ec) && ::access(cand.c_str(), X_OK) == 0)
      return cand.string();
  }
  return "";
}

// The bundled fallback backend: a node script speaking SMT-LIB 2 on stdio.
// Looked up near the working directory and the executable.
std::string find_shim() {
  std::vector<fs::path> roots;
  std::error_code ec;
  roots.push_back(fs::current_path(ec));
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    fs::path dir = exe.parent_path();
    roots.push_back(dir);
    roots.push_back(dir.parent_path());
    roots.push_back(dir.parent_path().parent_path());
  }
  for (const fs::path& r : roots) {
    fs::path cand = r / "tools" / "solver-shim" / "smt2d.js";
    if (fs::exists(cand, ec)) return cand.string();
  }
  return "";
}

// Resolution order: explicit flag, DPNCHECK_SOLVER, z3 on PATH, bundled
// node shim. Empty when nothing is available.
std::string discover_solver(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DPNCHECK_SOLVER"); env && *env)
    return env;
  if (std::string z3 = find_on_path("z3"); !z3.empty()) return z3 + " -in";
  if (std::string shim = find_shim(); !shim.empty()) {
    std::string node = find_on_path("node");
    if (!node.empty()) return node + " " + shim;
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal alignments of an event log against a Petri net with data"};

  std::string model_path, log_path, solver_flag, out_path, dump_dir;
  std::string cost_name = "standard";
  std::string format = "csv";
  double timeout_s = 600.0;
  long long bound = -1;
  size_t retry = 3;
  size_t jobs = 1;
  unsigned long seed = 0;
  bool no_cluster = false, verbose = false, verify_transfer = false;
  bool no_restrict_steps = false, no_boolean_marking = false;
  bool no_relax_distance = false, no_name_subterms = false;

  app.add_option("--model", model_path, "net (PNML with data annotations)")
      ->required();
  app.add_option("--log", log_path, "event log (XES)")->required();
  app.add_option("--cost", cost_name, "penalty profile")
      ->check(CLI::IsMember({"standard", "levenshtein"}))
      ->capture_default_str();
  app.add_option("--solver", solver_flag,
                 "SMT solver command reading SMT-LIB 2 on stdin (default: "
                 "$DPNCHECK_SOLVER, z3 on PATH, or the bundled node shim)");
  app.add_option("--timeout", timeout_s, "per-check solver budget, seconds")
      ->capture_default_str();
  app.add_option("--bound", bound,
                 "run-length bound override (default: trace length plus "
                 "shortest path to the final marking)");
  app.add_option("--retry", retry,
                 "extra run-length steps tried when a bound is infeasible")
      ->capture_default_str();
  app.add_option("--jobs", jobs, "parallel solver sessions")
      ->capture_default_str();
  app.add_flag("--no-cluster", no_cluster,
               "solve every unique trace instead of one per cluster");
  app.add_flag("--verbose", verbose, "print the alignments");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "report path (default: stdout)");
  app.add_option("--dump-smt", dump_dir,
                 "save every emitted solver script into this directory");
  app.add_option("--seed", seed, "reserved for deterministic shuffling")
      ->group("");
  app.add_flag("--verify-transfer", verify_transfer,
               "re-solve cluster members and cross-check transferred costs");
  app.add_flag("--no-restrict-steps", no_restrict_steps,
               "disable reachability-restricted step domains");
  app.add_flag("--no-boolean-marking", no_boolean_marking,
               "disable boolean place encoding on one-bounded nets");
  app.add_flag("--no-relax-distance", no_relax_distance,
               "encode distance cells as equalities, not lower bounds");
  app.add_flag("--no-name-subterms", no_name_subterms,
               "do not name shared subterms in the emitted scripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? kExitOk : kExitConfig;
  }

  dpncheck::PipelineOptions opts;
  opts.profile = *dpncheck::PenaltyProfile::by_name(cost_name);
  opts.cluster = !no_cluster;
  opts.jobs = jobs;
  opts.verbose = verbose;
  opts.verify_transfer = verify_transfer;
  opts.conformance.retry = retry;
  opts.conformance.dump_dir = dump_dir;
  opts.conformance.solver.check_timeout_s = timeout_s;
  opts.conformance.encode.restrict_steps = !no_restrict_steps;
  opts.conformance.encode.boolean_marking = !no_boolean_marking;
  opts.conformance.encode.relax_distance = !no_relax_distance;
  opts.conformance.encode.name_subterms = !no_name_subterms;
  if (bound >= 0)
    opts.conformance.encode.bound_override = static_cast<size_t>(bound);

  opts.conformance.solver.command = discover_solver(solver_flag);
  if (opts.conformance.solver.command.empty()) {
    std::cerr << "error: no SMT solver found; pass --solver, set "
                 "DPNCHECK_SOLVER, or install z3 / the node shim\n";
    return kExitSolverUnavailable;
  }

  // Parse inputs, timing the phase for the summary split.
  dpncheck::EventLog log;
  dpncheck::ParseDiagnostics diag;
  auto t0 = std::chrono::steady_clock::now();
  std::optional<dpncheck::DPN> parsed_net;
  try {
    parsed_net = dpncheck::parse_pnml_file(model_path, &diag);
    log = dpncheck::parse_xes_file(log_path, *parsed_net, &diag);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  opts.parse_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (const std::string& w : diag.warnings)
    std::cerr << "warning: " << w << "\n";

  dpncheck::PipelineResult result;
  try {
    result = dpncheck::run_pipeline(*parsed_net, log, opts);
  } catch (const dpncheck::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverUnavailable;
  } catch (const dpncheck::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const dpncheck::LogError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }

  // Report to --out or stdout; summary and verbose tables go to stderr when
  // the report occupies stdout.
  std::ofstream out_file;
  bool to_stdout = out_path.empty();
  if (!to_stdout) {
    out_file.open(out_path);
    if (!out_file) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitConfig;
    }
  }
  std::ostream& report = to_stdout ? std::cout : out_file;
  if (format == "json")
    dpncheck::write_report_json(result.rows, report, verbose);
  else
    dpncheck::write_report_csv(result.rows, report);

  std::ostream& chatter = to_stdout ? std::cerr : std::cout;
  if (verbose) {
    for (const dpncheck::ReportRow& row : result.rows) {
      chatter << "trace " << row.trace_id << " (cost "
              << (row.cost ? dpncheck::cost_text(*row.cost)
                           : std::string("TIMEOUT"))
              << "):\n";
      for (const auto& mv : row.alignment)
        chatter << "  " << mv[2] << ": " << mv[0] << " | " << mv[1] << "\n";
    }
  }
  chatter << dpncheck::summary_text(result.summary);

  return result.summary.timed_out > 0 ? kExitTimeouts : kExitOk;
}
