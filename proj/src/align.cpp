#include "dpncheck/align.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include "dpncheck/cluster.hpp"

namespace dpncheck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Value& model_value(const std::map<std::string, Value>& model,
                         const std::string& name) {
  auto it = model.find(name);
  if (it == model.end())
    throw AlignError("solver model omits a value for " + name);
  return it->second;
}

// Converts a raw model value to the process variable's sort. Rational
// variables accept whole-number answers; string variables travel as pool
// codes, and a code the pool never issued gets a fresh placeholder spelling
// (the solver is free to invent any integer for an unconstrained string).
Value adapt_model_value(const Value& raw, Sort sort, StringPool& pool,
                        const std::string& name) {
  switch (sort) {
    case Sort::Bool:
      if (raw.sort() == Sort::Bool) return raw;
      break;
    case Sort::Int:
      if (raw.sort() == Sort::Int) return raw;
      break;
    case Sort::Rat:
      if (raw.sort() == Sort::Rat) return raw;
      if (raw.sort() == Sort::Int) return Value::rational(raw.widen());
      break;
    case Sort::String: {
      if (raw.sort() != Sort::Int) break;
      const Int& code = raw.as_int();
      if (code >= 0 && code < Int(pool.size()))
        return Value::string(code.convert_to<int64_t>());
      return Value::string(pool.intern("<other#" + code.str() + ">"));
    }
  }
  throw AlignError("model value for " + name + " has the wrong shape (" +
                   raw.display() + " for a " + sort_name(sort) + " variable)");
}

// Every constant whose value the decoder reads back from a model.
std::vector<std::string> query_names(const Encoding& enc) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  auto push = [&](const std::string& s) {
    if (seen.insert(s).second) names.push_back(s);
  };
  for (const auto& s : enc.step_name) push(s);
  for (const auto& row : enc.data_name)
    for (const auto& dn : row) push(dn);
  push(enc.delta_name);
  return names;
}

void dump_script(const Encoding& enc, const std::string& dir,
                 const std::string& trace_id, size_t bound) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string safe;
  for (char c : trace_id)
    safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
             c == '_' || c == '.')
                ? c
                : '_';
  if (safe.empty()) safe = "trace";
  std::ofstream out(dir + "/" + safe + "_b" + std::to_string(bound) +
                    ".smt2");
  enc.print_script(out);
  out << "(check-sat)\n(get-value (" << enc.delta_name << "))\n";
}

const Value& source_write(const Move& mv, const std::string& v) {
  auto it = mv.firing.beta.find(AnnVar{v, true});
  if (it == mv.firing.beta.end())
    throw AlignError("alignment to transfer omits the written value of " + v);
  return it->second;
}

std::string event_text(const Event& e, const StringPool* pool) {
  if (e.payload.empty()) return e.activity;
  std::string s = e.activity + "{";
  bool first = true;
  for (const auto& [name, val] : e.payload) {
    if (!first) s += ", ";
    first = false;
    s += name + "=" + val.display(pool);
  }
  return s + "}";
}

}  // namespace

Run decode_run(const DPN& net, const Encoding& enc,
               const std::map<std::string, Value>& model) {
  Run run;
  StringPool& pool = *net.pool();
  for (size_t i = 1; i <= enc.n; ++i) {
    const std::string& sname = enc.step_name[i - 1];
    const Value& sv = model_value(model, sname);
    if (sv.sort() != Sort::Int)
      throw AlignError("value of " + sname + " is not an integer");
    const Int& s = sv.as_int();
    if (s == 0) continue; // padding step
    if (s < 1 || s > Int(net.transitions().size()))
      throw AlignError("value of " + sname + " picks transition " + s.str() +
                       ", outside the net");
    size_t t = s.convert_to<size_t>() - 1;
    const Transition& tr = net.transitions()[t];

    TransitionFiring firing{t, {}};
    for (const std::string& v : tr.read_set) {
      size_t vi = *net.variable_index(v);
      const std::string& dn = enc.data_name[i - 1][vi];
      firing.beta[AnnVar{v, false}] = adapt_model_value(
          model_value(model, dn), net.variables()[vi].sort, pool, dn);
    }
    for (const std::string& v : tr.write_set) {
      size_t vi = *net.variable_index(v);
      const std::string& dn = enc.data_name[i][vi];
      firing.beta[AnnVar{v, true}] = adapt_model_value(
          model_value(model, dn), net.variables()[vi].sort, pool, dn);
    }
    run.push_back(std::move(firing));
  }

  // The model satisfied the constraints, so a replay failure means the
  // encoding diverged from the net semantics.
  auto replay = net.replay_run(run);
  if (!replay.ok || !replay.reached_final)
    throw AlignError("solver model decodes to an illegal run: " +
                     (replay.ok ? std::string("final marking missed")
                                : replay.error));
  return run;
}

Alignment decode_alignment(const DPN& net, const LogTrace& trace,
                           const Run& run, const PenaltyProfile& pf,
                           std::optional<Cost> solver_cost) {
  auto d = distance_matrix(net, trace, run, pf);
  Cost exact = d[trace.events.size()][run.size()];
  if (solver_cost && exact != *solver_cost)
    throw AlignError("distance table corner " + cost_text(exact) +
                     " disagrees with the solver objective " +
                     cost_text(*solver_cost));
  return reconstruct_alignment(net, trace, run, pf);
}

ConformanceResult conformance(const DPN& net, const LogTrace& trace,
                              const PenaltyProfile& pf,
                              const ConformanceOptions& opts) {
  ConformanceResult result;
  result.trace_id = trace.id;

  const size_t base =
      opts.encode.bound_override
          ? *opts.encode.bound_override
          : compute_bound(net, trace.events.size(),
                          opts.encode.exploration_cap);

  for (size_t attempt = 0;; ++attempt) {
    EncodeOptions eo = opts.encode;
    eo.bound_override = base + attempt;

    auto t_enc = Clock::now();
    Encoding enc = encode(net, trace, pf, eo);
    result.encode_s += seconds_since(t_enc);
    result.bound = base + attempt;

    if (!opts.dump_dir.empty())
      dump_script(enc, opts.dump_dir, trace.id, result.bound);

    // One fresh child per attempt; its assertion stack dies with it.
    auto t_solve = Clock::now();
    SolverSession session;
    session.start(opts.solver);
    session.send(enc.script());
    MinimizeResult min =
        minimize_objective(session, enc.delta_name, query_names(enc),
                           Int(enc.big_m - 1), opts.strategy);
    result.solve_s += seconds_since(t_solve);
    result.checks += min.checks;
    result.status = min.status;

    if (min.status == CheckStatus::Unsat) {
      // Data guards can rule out every run at the control-flow bound; give
      // the run a little more room before concluding there is none.
      if (attempt < opts.retry) continue;
      throw AlignError("no alignment found at bound " +
                       std::to_string(result.bound) + " (started from " +
                       std::to_string(base) + " with " +
                       std::to_string(opts.retry) + " retries)");
    }
    if (min.status == CheckStatus::Error)
      throw SolverError(session.last_error().empty()
                            ? "solver reported an error during the search"
                            : session.last_error());

    if (!min.model.empty()) {
      Run run = decode_run(net, enc, min.model);
      std::optional<Cost> expected;
      if (min.status == CheckStatus::Sat && min.proven_optimal && min.best)
        expected = min.best->convert_to<Cost>();
      result.alignment = decode_alignment(net, trace, run, pf, expected);
      result.run = net.replay_run(run).completed;
      result.cost = alignment_cost(net, trace, result.alignment, pf);
      result.optimal = min.status == CheckStatus::Sat && min.proven_optimal;
      if (auto err = check_alignment(net, trace, result.alignment))
        throw AlignError("decoded alignment is malformed: " + *err);
      if (expected && *result.cost != *expected)
        throw AlignError("recomputed alignment cost " +
                         cost_text(*result.cost) +
                         " disagrees with the proven optimum " +
                         cost_text(*expected));
    }
    return result;
  }
}

Alignment transfer_alignment(const DPN& net, const Alignment& gamma,
                             const LogTrace& source, const LogTrace& target,
                             const PenaltyProfile& pf) {
  if (source.events.size() != target.events.size())
    throw AlignError("transfer requires traces of equal length");
  const AtomSet atoms = extract_atoms(net);

  Alignment out;
  out.reserve(gamma.size());
  State state = net.initial_state();
  size_t k = 0; // next trace event to consume

  for (const Move& mv : gamma) {
    if (mv.kind == MoveKind::Log) {
      if (k >= target.events.size())
        throw AlignError("alignment consumes more events than the trace has");
      out.push_back(Move{MoveKind::Log, k, TransitionFiring{0, {}}});
      ++k;
      continue;
    }

    const Transition& tr = net.transitions()[mv.firing.transition];
    TransitionFiring firing{mv.firing.transition, {}};
    // Reads always track the replayed target state.
    for (const std::string& v : tr.read_set)
      firing.beta[AnnVar{v, false}] = state.data.at(v);

    if (mv.kind == MoveKind::Model) {
      // Model moves keep their written values; equivalence of the replayed
      // states keeps the guard satisfied.
      for (const std::string& v : tr.write_set)
        firing.beta[AnnVar{v, true}] = source_write(mv, v);
    } else {
      if (k >= target.events.size())
        throw AlignError("alignment consumes more events than the trace has");
      const Event& e1 = source.events[k];
      const Event& e2 = target.events[k];
      for (const std::string& v : tr.write_set) {
        const Value& b1 = source_write(mv, v);
        Value b2 = b1;
        auto a1 = e1.payload.find(v);
        auto a2 = e2.payload.find(v);
        if (atoms.is_restricted(v) && a1 != e1.payload.end() &&
            a2 != e2.payload.end()) {
          // Keep the agreement pattern: copy the target's value when the
          // source run matched its event, swap in the source's value when
          // the run happened to hit the target's, and keep the value
          // otherwise.
          if (b1 == a1->second)
            b2 = a2->second;
          else if (b1 == a2->second)
            b2 = a1->second;
        }
        firing.beta[AnnVar{v, true}] = b2;
      }
    }

    Move nm{mv.kind, mv.kind == MoveKind::Sync ? k : 0, firing};
    if (mv.kind == MoveKind::Sync) ++k;
    try {
      state = net.fire(state, firing);
    } catch (const std::exception& e) {
      throw AlignError("transfer produced an illegal firing of '" + tr.id +
                       "': " + e.what());
    }
    out.push_back(std::move(nm));
  }
  if (k != target.events.size())
    throw AlignError("alignment leaves trace events unconsumed");

  // Cost equality is guaranteed by the equivalence precondition; a mismatch
  // means the caller paired traces from different clusters.
  Cost cs = alignment_cost(net, source, gamma, pf);
  Cost ct = alignment_cost(net, target, out, pf);
  if (cs != ct)
    throw AlignError("transferred alignment costs " + cost_text(ct) +
                     " but the source alignment costs " + cost_text(cs));
  return out;
}

std::vector<std::array<std::string, 3>> alignment_rows(
    const DPN& net, const LogTrace& trace, const Alignment& alignment) {
  const StringPool* pool = net.pool().get();
  std::vector<std::array<std::string, 3>> rows;
  for (const Move& mv : alignment) {
    std::array<std::string, 3> row;
    row[0] = mv.kind == MoveKind::Model
                 ? ">>"
                 : event_text(trace.events.at(mv.event), pool);
    row[1] = mv.kind == MoveKind::Log ? ">>" : net.firing_text(mv.firing);
    row[2] = mv.kind == MoveKind::Log
                 ? "log"
                 : (mv.kind == MoveKind::Model ? "model" : "sync");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string alignment_table(const DPN& net, const LogTrace& trace,
                            const Alignment& alignment) {
  std::vector<std::array<std::string, 3>> rows;
  rows.push_back({"log event", "model firing", "move"});
  for (auto& row : alignment_rows(net, trace, alignment))
    rows.push_back(std::move(row));
  std::array<size_t, 3> width{0, 0, 0};
  for (const auto& r : rows)
    for (size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], r[c].size());
  std::string text;
  for (const auto& r : rows) {
    for (size_t c = 0; c < 3; ++c) {
      std::string cell = r[c];
      cell.resize(width[c], ' ');
      text += c == 0 ? "" : " | ";
      text += cell;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    text += '\n';
  }
  return text;
}

}  // namespace dpncheck
