#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpncheck/guard.hpp"
#include "dpncheck/value.hpp"

namespace dpncheck {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Token counts per place, indexed like DPN::places().
using Marking = std::vector<uint32_t>;

struct Transition {
  std::string id;
  std::string label; // empty means silent
  Guard guard;
  std::set<std::string> read_set;  // derived from the guard
  std::set<std::string> write_set; // derived from the guard
  std::vector<std::pair<size_t, uint32_t>> pre;  // (place index, multiplicity)
  std::vector<std::pair<size_t, uint32_t>> post;

  bool silent() const { return label.empty(); }
};

struct VariableDecl {
  std::string name;
  Sort sort;
  Value initial;
};

// Net state: a marking plus a total assignment of the process variables.
struct State {
  Marking marking;
  std::map<std::string, Value> data;

  bool operator==(const State& o) const {
    return marking == o.marking && data == o.data;
  }
};

// One step of a run: a transition plus values for its annotated variables.
// Read entries may be omitted (they are determined by the current state);
// write entries are mandatory.
struct TransitionFiring {
  size_t transition;
  Assignment beta;
};

using Run = std::vector<TransitionFiring>;

struct DPNOptions {
  // Distinct activity labels are always required; by default at most one
  // silent transition is accepted as well, which this flag relaxes.
  bool allow_multiple_silent = false;
};

class DPN;

// Assembles a net; finish() validates and produces the immutable DPN.
class DPNBuilder {
 public:
  explicit DPNBuilder(StringPoolPtr pool = nullptr);

  DPNBuilder& add_variable(const std::string& name, Sort sort,
                           std::optional<Value> initial = std::nullopt);
  DPNBuilder& add_place(const std::string& id);
  // Guard text parsed against the declared variables; empty means true.
  DPNBuilder& add_transition(const std::string& id, const std::string& label,
                             const std::string& guard_text);
  DPNBuilder& add_transition(const std::string& id, const std::string& label,
                             Guard guard);
  DPNBuilder& add_arc(const std::string& from, const std::string& to,
                      uint32_t multiplicity = 1);
  DPNBuilder& mark_initial(const std::string& place, uint32_t tokens = 1);
  DPNBuilder& mark_final(const std::string& place, uint32_t tokens = 1);

  StringPool& pool() { return *pool_; }

  DPN finish(const DPNOptions& opts = {});

 private:
  friend class DPN;
  StringPoolPtr pool_;
  std::vector<std::string> places_;
  std::map<std::string, size_t> place_index_;
  std::vector<Transition> transitions_;
  std::map<std::string, size_t> transition_index_;
  std::vector<VariableDecl> variables_;
  std::map<std::string, size_t> variable_index_;
  std::map<std::string, std::optional<Value>> pending_initials_;
  std::vector<std::tuple<std::string, std::string, uint32_t>> arcs_;
  std::map<std::string, uint32_t> initial_, final_;
};

// Result of the data-less forward exploration of the control skeleton.
struct Exploration {
  // fireable[i] holds the transitions fireable within the first i+1 steps
  // (cumulative), ignoring guards. Size equals the requested horizon.
  std::vector<std::set<size_t>> fireable;
  // True when every marking reachable from M_I was visited (the frontier
  // closed before the horizon and the node cap).
  bool complete = false;
  // True when complete and no visited marking puts 2 tokens on a place.
  bool one_bounded = false;
  size_t markings_visited = 0;
};

class DPN {
 public:
  const std::vector<std::string>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<VariableDecl>& variables() const { return variables_; }
  const Marking& initial_marking() const { return initial_; }
  const Marking& final_marking() const { return final_; }
  const StringPoolPtr& pool() const { return pool_; }

  std::optional<size_t> place_index(const std::string& id) const;
  std::optional<size_t> transition_index(const std::string& id) const;
  std::optional<size_t> variable_index(const std::string& name) const;
  // Index of the unique transition carrying this activity label.
  std::optional<size_t> transition_by_label(const std::string& label) const;

  std::map<std::string, Sort> variable_sorts() const;

  State initial_state() const;

  // Fills in omitted read entries of beta from the state. Throws GuardError
  // if a write entry for a written variable is missing or a value has the
  // wrong sort.
  Assignment complete_firing(const State& state,
                             const TransitionFiring& firing) const;

  // True iff the transition's input places are marked, every explicitly
  // given read entry equals the state's value, and the guard holds under
  // the completed assignment.
  bool enabled(const State& state, const TransitionFiring& firing) const;

  // Successor state. Throws ModelError if the firing is not enabled.
  State fire(const State& state, const TransitionFiring& firing) const;

  struct Replay {
    bool ok = false;
    std::string error;      // empty when ok
    State final_state;      // state after the last successful step
    Run completed;          // input run with read entries filled in
    bool reached_final = false;
  };

  // Replays a run from the initial state, stopping at the first illegal
  // firing.
  Replay replay_run(const Run& run) const;

  // True iff the run is a legal firing sequence from the initial state and,
  // when require_final is set, ends in the final marking.
  bool validate_run(const Run& run, bool require_final = true) const;

  // Breadth-first search over markings, ignoring guards.
  Exploration explore(size_t horizon, size_t node_cap = 200000) const;

  // Length of the shortest transition sequence from M_I to M_F in the
  // control skeleton; nullopt if unreachable within the cap.
  std::optional<size_t> shortest_final_distance(size_t node_cap = 200000) const;

  // Human-readable one-line description of a firing, for reports.
  std::string firing_text(const TransitionFiring& firing,
                          bool include_reads = false) const;

 private:
  friend class DPNBuilder;
  DPN() = default;

  StringPoolPtr pool_;
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::vector<VariableDecl> variables_;
  std::map<std::string, size_t> place_index_;
  std::map<std::string, size_t> transition_index_;
  std::map<std::string, size_t> variable_index_;
  std::map<std::string, size_t> label_index_;
  Marking initial_, final_;
};

}  // namespace dpncheck
