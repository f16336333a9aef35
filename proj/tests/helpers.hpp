#pragma once

// Shared fixtures: the chain example net and its traces, solver lookup from
// the environment, and the generators behind the property suites.

#include <array>
#include <cstdlib>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dpncheck/align.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"
#include "dpncheck/oracle.hpp"
#include "dpncheck/solver.hpp"

namespace fixtures {

using namespace dpncheck;

// Solver command exported by the build into the test environment; empty when
// discovery failed (solver-backed tests then fail with a clear message).
inline std::string solver_command() {
  const char* cmd = std::getenv("DPNCHECK_SOLVER");
  return cmd == nullptr ? std::string() : std::string(cmd);
}

inline SolverConfig test_solver(double timeout_s = 120.0) {
  SolverConfig cfg;
  cfg.command = solver_command();
  cfg.check_timeout_s = timeout_s;
  return cfg;
}

inline ConformanceOptions conformance_options(double timeout_s = 120.0) {
  ConformanceOptions opts;
  opts.solver = test_solver(timeout_s);
  return opts;
}

// Four-place chain with a guarded write on each visible step, a silent data
// check in front of the final place, and an increment loop on it:
//
//   p0 -(a: x' >= 0)-> p1 -(b: y' > 0)-> p2 -(tau: x <= 3 && y < 4)-> p3
//   p3 <-> (d: y' == y + 1)
//
// x and y are integers starting at 0; p3 is the final marking.
inline DPN chain_net() {
  DPNBuilder b;
  b.add_variable("x", Sort::Int).add_variable("y", Sort::Int);
  b.add_place("p0").add_place("p1").add_place("p2").add_place("p3");
  b.add_transition("t_a", "a", "x' >= 0");
  b.add_transition("t_b", "b", "y' > 0");
  b.add_transition("t_tau", "", "x <= 3 && y < 4");
  b.add_transition("t_d", "d", "y' == y + 1");
  b.add_arc("p0", "t_a").add_arc("t_a", "p1");
  b.add_arc("p1", "t_b").add_arc("t_b", "p2");
  b.add_arc("p2", "t_tau").add_arc("t_tau", "p3");
  b.add_arc("p3", "t_d").add_arc("t_d", "p3");
  b.mark_initial("p0").mark_final("p3");
  return b.finish();
}

// Write domains for exhaustive search on the chain net: one representative
// on each side of every guard constant, plus room for the y increment.
inline FiniteDomains chain_domains() {
  FiniteDomains d;
  d.set_int_range("x", -1, 5).set_int_range("y", -1, 5);
  return d;
}

inline Event ev(std::string activity,
                std::vector<std::pair<std::string, long>> ints = {}) {
  Event e;
  e.activity = std::move(activity);
  for (const auto& [name, value] : ints)
    e.payload.emplace(name, Value::integer(Int(value)));
  return e;
}

// Replays cleanly: a writes 2, b writes 1, the silent check passes.
inline LogTrace fitting_trace() {
  return {"t-fit", {ev("a", {{"x", 2}}), ev("b", {{"y", 1}})}};
}

// x = 4 violates the silent check; the best repair writes 3 instead, one
// mismatched write on the synchronized a.
inline LogTrace deviating_trace() {
  return {"t-dev", {ev("a", {{"x", 4}}), ev("b", {{"y", 1}})}};
}

// Four traces over the chain net: e1 and e2 satisfy the same guard atoms
// everywhere, e3 crosses the x <= 3 split, e4 differs on the unrestricted y.
inline EventLog payload_log() {
  EventLog log;
  log.traces.push_back({"e1", {ev("a", {{"x", 2}}), ev("b", {{"y", 1}})}});
  log.traces.push_back({"e2", {ev("a", {{"x", 3}}), ev("b", {{"y", 1}})}});
  log.traces.push_back({"e3", {ev("a", {{"x", 4}}), ev("b", {{"y", 1}})}});
  log.traces.push_back({"e4", {ev("a", {{"x", 3}}), ev("b", {{"y", 2}})}});
  return log;
}

// CNF over three booleans; literals are (variable index, negated).
struct Cnf {
  std::vector<std::array<std::pair<size_t, bool>, 3>> clauses;

  bool eval(const std::array<bool, 3>& assign) const {
    for (const auto& clause : clauses) {
      bool any = false;
      for (const auto& [var, neg] : clause) any = any || (assign[var] != neg);
      if (!any) return false;
    }
    return true;
  }

  bool satisfiable() const {
    for (int bits = 0; bits < 8; ++bits)
      if (eval({(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0}))
        return true;
    return false;
  }

  // Guard text over the written copies, e.g. "(b0' || !b1' || b2') && ...".
  std::string guard_text() const {
    std::string out;
    for (const auto& clause : clauses) {
      if (!out.empty()) out += " && ";
      out += "(";
      for (size_t i = 0; i < clause.size(); ++i) {
        if (i > 0) out += " || ";
        if (clause[i].second) out += "!";
        out += "b" + std::to_string(clause[i].first) + "'";
      }
      out += ")";
    }
    return out;
  }
};

inline Cnf random_cnf(std::mt19937_64& rng) {
  auto pick = [&rng](size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
  };
  Cnf cnf;
  size_t n_clauses = 2 + pick(8);
  for (size_t c = 0; c < n_clauses; ++c) {
    std::array<std::pair<size_t, bool>, 3> clause;
    for (auto& lit : clause) lit = {pick(3), pick(2) == 1};
    cnf.clauses.push_back(clause);
  }
  return cnf;
}

// Two-transition choice net probing satisfiability: t_sat carries the
// formula over its written booleans, t_any is an unguarded alternative.
// Against the one-event trace, the optimal cost is 0 exactly when the
// formula is satisfiable, and otherwise 2 (log move plus the write-free
// t_any model move).
struct ChoiceInstance {
  DPN net;
  LogTrace trace;
  bool satisfiable;
};

inline ChoiceInstance choice_instance(const Cnf& cnf) {
  DPNBuilder b;
  b.add_variable("b0", Sort::Bool)
      .add_variable("b1", Sort::Bool)
      .add_variable("b2", Sort::Bool);
  b.add_place("in").add_place("out");
  b.add_transition("t_sat", "probe", cnf.guard_text());
  b.add_transition("t_any", "other", "");
  b.add_arc("in", "t_sat").add_arc("t_sat", "out");
  b.add_arc("in", "t_any").add_arc("t_any", "out");
  b.mark_initial("in").mark_final("out");
  return {b.finish(), LogTrace{"probe-1", {ev("probe")}}, cnf.satisfiable()};
}

// One randomized conformance problem small enough for exhaustive search: a
// chain of 2..4 guarded steps, possibly one extra self-loop or skip, at
// most `max_vars` variables, and a trace of length <= 6 - chain length (so
// the default run bound never exceeds 6).
//
// Guard atoms compare a single variable against a constant from {1, 2, 3}.
// The integer domain {0..4} holds a representative of every region those
// constants can distinguish, and payload values are drawn from the same
// set. Replacing any written value by its in-domain region-mate therefore
// changes neither guard satisfaction nor write-mismatch counts, so the
// restriction to domain writes preserves the optimal cost exactly.
struct RandomInstance {
  DPN net;
  LogTrace trace;
  FiniteDomains domains;
};

inline RandomInstance random_instance(std::mt19937_64& rng,
                                      size_t max_vars = 2) {
  auto pick = [&rng](size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
  };
  auto chance = [&rng](double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  };

  DPNBuilder b;
  size_t nvars = max_vars == 0 ? 0 : pick(max_vars + 1);
  std::vector<std::string> var_names;
  std::vector<Sort> var_sorts;
  FiniteDomains domains;
  for (size_t v = 0; v < nvars; ++v) {
    std::string name(1, static_cast<char>('u' + v));
    bool is_bool = chance(0.25);
    var_names.push_back(name);
    var_sorts.push_back(is_bool ? Sort::Bool : Sort::Int);
    b.add_variable(name, var_sorts.back());
    if (is_bool)
      domains.set(name, {Value::boolean(false), Value::boolean(true)});
    else
      domains.set_int_range(name, 0, 4);
  }

  auto random_guard = [&]() -> std::string {
    if (nvars == 0 || chance(0.35)) return "";
    auto atom = [&]() -> std::string {
      size_t v = pick(nvars);
      std::string annot = chance(0.7) ? "'" : "";
      if (var_sorts[v] == Sort::Bool) {
        std::string base = var_names[v] + annot;
        return chance(0.5) ? base : "!" + base;
      }
      const char* ops[] = {"<", "<=", ">", ">=", "=="};
      return var_names[v] + annot + " " + ops[pick(5)] + " " +
             std::to_string(1 + pick(3));
    };
    std::string g = atom();
    if (chance(0.3))
      g = "(" + g + (chance(0.5) ? ") && (" : ") || (") + atom() + ")";
    return g;
  };

  size_t k = 2 + pick(3);
  for (size_t p = 0; p <= k; ++p) b.add_place("p" + std::to_string(p));
  b.mark_initial("p0").mark_final("p" + std::to_string(k));

  const char* labels[] = {"a", "b", "c", "d", "e"};
  size_t next_label = 0;
  bool used_silent = false;
  std::vector<std::string> visible;

  auto add_step = [&](const std::string& id, const std::string& from,
                      const std::string& to, bool may_be_silent) {
    std::string label;
    if (may_be_silent && !used_silent && chance(0.2)) {
      used_silent = true;
    } else {
      label = labels[next_label++];
      visible.push_back(label);
    }
    b.add_transition(id, label, random_guard());
    b.add_arc(from, id).add_arc(id, to);
  };

  for (size_t i = 1; i <= k; ++i)
    add_step("t" + std::to_string(i), "p" + std::to_string(i - 1),
             "p" + std::to_string(i), true);
  if (chance(0.5)) {
    if (chance(0.5)) {
      size_t p = pick(k + 1);
      add_step("t_loop", "p" + std::to_string(p), "p" + std::to_string(p),
               false);
    } else {
      size_t i = pick(k - 1);
      add_step("t_skip", "p" + std::to_string(i), "p" + std::to_string(i + 2),
               false);
    }
  }

  LogTrace trace;
  trace.id = "r";
  size_t max_m = k >= 6 ? 0 : std::min<size_t>(4, 6 - k);
  size_t m = pick(max_m + 1);
  for (size_t j = 0; j < m; ++j) {
    Event e;
    e.activity = (!visible.empty() && !chance(0.1))
                     ? visible[pick(visible.size())]
                     : "z";
    for (size_t v = 0; v < nvars; ++v) {
      if (!chance(0.6)) continue;
      e.payload[var_names[v]] = var_sorts[v] == Sort::Bool
                                    ? Value::boolean(chance(0.5))
                                    : Value::integer(Int(pick(5)));
    }
    trace.events.push_back(e);
  }

  return {b.finish(), std::move(trace), std::move(domains)};
}

}  // namespace fixtures
