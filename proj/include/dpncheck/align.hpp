#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/encoder.hpp"
#include "dpncheck/log.hpp"
#include "dpncheck/solver.hpp"

namespace dpncheck {

// Internal inconsistency between solver output and the model semantics.
// Reaching one of these means an encoder or decoder bug, not bad input.
struct AlignError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConformanceOptions {
  EncodeOptions encode;
  SolverConfig solver;
  // Extra run-length slack tried when the constraints are unsatisfiable at
  // the computed bound (data guards can rule out every short run).
  size_t retry = 3;
  MinimizeStrategy strategy = MinimizeStrategy::BinarySearch;
  // When nonempty, every emitted script is saved under this directory.
  std::string dump_dir;
};

struct ConformanceResult {
  std::string trace_id;
  CheckStatus status = CheckStatus::Error;
  // True when the cost is a proven minimum; false on timeout, where cost
  // (if present) is only the best upper bound found.
  bool optimal = false;
  std::optional<Cost> cost;
  Alignment alignment; // empty when no model was obtained
  Run run;             // model projection of the alignment, reads filled in
  size_t bound = 0;    // run-length bound of the reported attempt
  size_t checks = 0;   // check-sat calls across all attempts
  double encode_s = 0.0;
  double solve_s = 0.0;
};

// Rebuilds the run from a sat model: step i fires transition ν(S_i) - 1
// (0 is padding and is skipped), reads taken from the step i-1 data
// variables and writes from step i. The result passes validate_run; any
// mismatch with the net throws AlignError.
Run decode_run(const DPN& net, const Encoding& enc,
               const std::map<std::string, Value>& model);

// Optimal alignment of the trace against the decoded run, recovered from an
// exact local distance table. When solver_cost is given (a proven optimum),
// the table's corner must agree with it; disagreement throws AlignError.
Alignment decode_alignment(const DPN& net, const LogTrace& trace,
                           const Run& run, const PenaltyProfile& pf,
                           std::optional<Cost> solver_cost = std::nullopt);

// Full per-trace pipeline: bound, encode, solve with cost minimization,
// decode, validate. Unsatisfiable bounds are retried with +1 slack up to
// opts.retry times, then reported as a hard error. Solver startup failures
// surface as SolverError.
ConformanceResult conformance(const DPN& net, const LogTrace& trace,
                              const PenaltyProfile& pf,
                              const ConformanceOptions& opts);

// Rewrites an optimal alignment of `source` into one for `target`, which
// must agree with source up to constant comparison (same activities, same
// defined payload variables, equivalent values). Linear single pass: log
// and sync events are re-pointed at target, model writes are kept, and sync
// writes of constant-comparison variables copy the target value when the
// model agreed with source, swap in the source value when the model hit the
// target's value, and stay put otherwise. The result is validated and must
// cost the same as the input alignment.
Alignment transfer_alignment(const DPN& net, const Alignment& gamma,
                             const LogTrace& source, const LogTrace& target,
                             const PenaltyProfile& pf);

// One row per move: (log event | model firing | move kind), with ">>" for
// the silent side of log and model moves.
std::vector<std::array<std::string, 3>> alignment_rows(
    const DPN& net, const LogTrace& trace, const Alignment& alignment);

// The same rows formatted as a three-column table for verbose output.
std::string alignment_table(const DPN& net, const LogTrace& trace,
                            const Alignment& alignment);

}  // namespace dpncheck
