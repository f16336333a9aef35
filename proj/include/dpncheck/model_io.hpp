#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"

namespace dpncheck {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseDiagnostics {
  std::vector<std::string> warnings;
  // Collected fatal problems; a nonempty list is thrown as a ParseError at
  // the end of the parse, so callers holding a result never see entries.
  std::vector<std::string> errors;
};

// Reads a net from PNML with the data extension: a variables section
// (name, type, optional initial value), per-transition guard strings over
// primed (written) and plain (read) variables, read/write variable lists,
// weighted arcs, and a final-markings section (mandatory; alignment needs a
// target marking). Listed read/write variables the guard does not mention
// are attached with vacuous guard conjuncts so they count as reads/writes.
DPN parse_pnml(std::istream& in, ParseDiagnostics* diag = nullptr,
               const DPNOptions& opts = {});
DPN parse_pnml_file(const std::string& path, ParseDiagnostics* diag = nullptr,
                    const DPNOptions& opts = {});

// Canonical serialization of a net in the dialect parse_pnml reads.
// parse_pnml(write_pnml(net)) is structurally equal to net.
std::string write_pnml(const DPN& net);

// Structural equality: same places, arcs, markings, variable declarations,
// and transitions with identical guard text. Used by the round-trip check.
bool structurally_equal(const DPN& a, const DPN& b);

// Reads an event log from XES. Activities come from the concept:name event
// attribute, data values from typed attributes (int, float with exact
// decimal conversion, boolean, string). Attributes not declared by the net
// are dropped with a warning; declared ones with an unconvertible type are
// errors naming the trace and event.
EventLog parse_xes(std::istream& in, const DPN& net,
                   ParseDiagnostics* diag = nullptr);
EventLog parse_xes_file(const std::string& path, const DPN& net,
                        ParseDiagnostics* diag = nullptr);

// One output row of the conformance pipeline.
struct ReportRow {
  std::string trace_id;
  size_t multiplicity = 1;
  size_t cluster = 0;
  std::optional<Cost> cost; // nullopt renders as TIMEOUT
  // Best cost seen before a timeout; reported in JSON only, never as the
  // cost (a non-optimal alignment must not masquerade as the answer).
  std::optional<Cost> upper_bound;
  bool optimal = true;
  double solve_s = 0.0;
  double encode_s = 0.0;
  // Filled in verbose mode: (log event | model firing | move kind).
  std::vector<std::array<std::string, 3>> alignment;
};

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& os);
// JSON embeds the alignment rows only when verbose is set.
void write_report_json(const std::vector<ReportRow>& rows, std::ostream& os,
                       bool verbose);

}  // namespace dpncheck
