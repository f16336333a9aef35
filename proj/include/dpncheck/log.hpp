#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpncheck/dpn.hpp"
#include "dpncheck/value.hpp"

namespace dpncheck {

struct LogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One logged event: an activity name plus the variable values it recorded.
struct Event {
  std::string activity;
  std::map<std::string, Value> payload;
};

struct LogTrace {
  std::string id;
  std::vector<Event> events;
};

struct EventLog {
  std::vector<LogTrace> traces;
};

// A trace deduplicated by behavior: its payload-identical copies collapse
// into one entry carrying the multiplicity and the ids of all originals.
struct UniqueTrace {
  LogTrace trace;                  // the first representative seen
  size_t multiplicity = 0;
  std::vector<std::string> trace_ids;
};

// Canonical spelling of a trace's behavior (activities plus payloads, ids
// ignored); equal keys mean interchangeable traces.
std::string trace_key(const LogTrace& trace);

// Collapses behaviorally identical traces, preserving first-seen order.
std::vector<UniqueTrace> dedupe(const EventLog& log);

// Checks every event against the model's variables: unknown attribute names
// and sort mismatches are errors (integers are accepted for rational
// variables and widened in place). Returns the number of events checked.
size_t reconcile_log(EventLog& log, const DPN& net);

}  // namespace dpncheck
