#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"
#include "dpncheck/smt.hpp"

namespace dpncheck {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EncodeOptions {
  // Restrict each step variable to transitions reachable that early (by a
  // data-less exploration) and share data variables no transition of the
  // step can write.
  bool restrict_steps = true;
  // Encode markings as booleans when the exploration proves the net
  // 1-bounded; falls back to integers otherwise.
  bool boolean_marking = true;
  // Replace distance-cell equalities by one-sided >= disjunctions, which is
  // enough when the objective is minimized.
  bool relax_distance = true;
  // Name subexpressions referenced more than once in the emitted script.
  bool name_subterms = true;
  // Run-length bound; defaults to trace length plus the shortest distance
  // from the initial to the final marking.
  std::optional<size_t> bound_override;
  size_t exploration_cap = 200000;
};

// The constraint system for one trace: find a run f_1..f_n (0 = padding)
// whose distance table against the trace makes delta[m][n] minimal.
//
// Assertion groups and their sizes (all options off, V nonempty):
//   init     |P| + |V|         initial marking and data
//   final    |P|               final marking after step n
//   trans    n                 step variables range over {0} u allowed
//   enabled  n * |T|           input places marked when a transition fires
//   mark     n * (|T| + 1)     token flow per firing, plus padding frame
//   data     n * (|T| + 1)     guard plus frame per firing, plus padding
//   delta    (m+1) * (n+1)     distance-table recurrence
// With restrict_steps, |T| shrinks to the per-step allowed set; with an
// empty V the data group is empty.
class Encoding {
 public:
  TermArena arena;
  size_t m = 0; // trace length
  size_t n = 0; // run-length bound
  Cost big_m = 0;

  std::vector<TermRef> step;                    // S_1..S_n
  std::vector<std::vector<TermRef>> mark;       // [i][p], i = 0..n
  std::vector<std::vector<TermRef>> data;       // [i][v], i = 0..n; may alias
  std::vector<std::set<size_t>> step_domain;    // allowed transitions per step
  std::vector<std::vector<TermRef>> delta;      // [i][j]
  bool bool_marking = false;

  std::vector<std::pair<std::string, TermRef>> assertions; // (group, term)
  std::map<std::string, size_t> group_counts;
  // Names for subterms shared across assertions; empty when naming is off.
  std::unordered_map<TermRef, std::string> shared_names;

  TermRef objective = 0; // delta[m][n]

  // Solver variable names for decoding: step_name[i-1] holds S_i,
  // data_name[i][v] the variable that carries X_{i,v} (an earlier step's
  // variable when the value is shared), delta_name the objective.
  std::vector<std::string> step_name;
  std::vector<std::vector<std::string>> data_name;
  std::string delta_name;

  bool uses_reals = false;

  // Emits the complete SMT-LIB 2 script prefix: logic, declarations, named
  // definitions and assertions. No check-sat; the solver session appends
  // commands incrementally.
  void print_script(std::ostream& os) const;
  std::string script() const;
};

// n = |trace| + shortest transition distance from M_I to M_F. Errors when
// the final marking is unreachable in the control skeleton.
size_t compute_bound(const DPN& net, size_t trace_len,
                     size_t exploration_cap = 200000);

Encoding encode(const DPN& net, const LogTrace& trace,
                const PenaltyProfile& profile, const EncodeOptions& opts = {});

}  // namespace dpncheck
