#pragma once

#include <string>
#include <vector>

#include "dpncheck/align.hpp"
#include "dpncheck/cluster.hpp"
#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"
#include "dpncheck/model_io.hpp"

namespace dpncheck {

struct PipelineOptions {
  PenaltyProfile profile = PenaltyProfile::standard();
  ConformanceOptions conformance;
  bool cluster = true;
  size_t jobs = 1;
  bool verbose = false; // fill alignment rows in the report
  // Debug mode: re-solve every cluster member and insist the transferred
  // alignment costs the same.
  bool verify_transfer = false;
  // Parse time measured by the caller, folded into the summary's split.
  double parse_s = 0.0;
};

struct PipelineSummary {
  size_t traces = 0;   // original log size
  size_t events = 0;
  size_t unique = 0;
  size_t clusters = 0;
  size_t solved = 0;   // clusters with a proven optimum
  size_t timed_out = 0;
  // Over original traces with a solved cluster: sum of cost * multiplicity,
  // count of perfectly fitting ones, and the largest cost seen.
  Cost total_cost = 0;
  size_t fitting = 0;
  Cost max_cost = 0;
  double parse_s = 0.0;
  double encode_s = 0.0;
  double solve_s = 0.0;
  double wall_s = 0.0;
};

struct PipelineResult {
  std::vector<ReportRow> rows; // one per unique trace, first-seen order
  PipelineSummary summary;
};

// Dedupe, cluster (unless disabled), solve one representative per cluster
// on a pool of `jobs` workers, transfer alignments to the other members,
// and collect report rows. A timed-out representative marks its whole
// cluster TIMEOUT; no transfer happens from a non-optimal alignment.
PipelineResult run_pipeline(const DPN& net, const EventLog& log,
                            const PipelineOptions& opts);

// Multi-line human-readable summary with the per-phase time split.
std::string summary_text(const PipelineSummary& s);

}  // namespace dpncheck
