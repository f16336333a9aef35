#include "dpncheck/dpn.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace dpncheck {

DPNBuilder::DPNBuilder(StringPoolPtr pool)
    : pool_(pool ? std::move(pool) : std::make_shared<StringPool>()) {}

DPNBuilder& DPNBuilder::add_variable(const std::string& name, Sort sort,
                                     std::optional<Value> initial) {
  if (variable_index_.count(name))
    throw ModelError("duplicate variable '" + name + "'");
  if (initial && initial->sort() != sort &&
      !(sort == Sort::Rat && initial->sort() == Sort::Int))
    throw ModelError("initial value of '" + name + "' is not of sort " +
                     sort_name(sort));
  variable_index_[name] = variables_.size();
  Value init = initial ? (sort == Sort::Rat && initial->sort() == Sort::Int
                              ? Value::rational(initial->widen())
                              : *initial)
                       : default_value(sort, *pool_);
  variables_.push_back({name, sort, std::move(init)});
  return *this;
}

DPNBuilder& DPNBuilder::add_place(const std::string& id) {
  if (place_index_.count(id)) throw ModelError("duplicate place '" + id + "'");
  place_index_[id] = places_.size();
  places_.push_back(id);
  return *this;
}

DPNBuilder& DPNBuilder::add_transition(const std::string& id,
                                       const std::string& label,
                                       const std::string& guard_text) {
  std::map<std::string, Sort> sorts;
  for (const auto& v : variables_) sorts[v.name] = v.sort;
  Guard g;
  try {
    g = Guard::parse(guard_text, sorts, *pool_);
  } catch (const GuardError& e) {
    throw ModelError("transition '" + id + "': " + e.what());
  }
  return add_transition(id, label, std::move(g));
}

DPNBuilder& DPNBuilder::add_transition(const std::string& id,
                                       const std::string& label, Guard guard) {
  if (transition_index_.count(id))
    throw ModelError("duplicate transition '" + id + "'");
  Transition t;
  t.id = id;
  t.label = label;
  t.read_set = guard.read_vars();
  t.write_set = guard.write_vars();
  t.guard = std::move(guard);
  transition_index_[id] = transitions_.size();
  transitions_.push_back(std::move(t));
  return *this;
}

DPNBuilder& DPNBuilder::add_arc(const std::string& from, const std::string& to,
                                uint32_t multiplicity) {
  if (multiplicity == 0) throw ModelError("zero-multiplicity arc");
  arcs_.emplace_back(from, to, multiplicity);
  return *this;
}

DPNBuilder& DPNBuilder::mark_initial(const std::string& place,
                                     uint32_t tokens) {
  initial_[place] += tokens;
  return *this;
}

DPNBuilder& DPNBuilder::mark_final(const std::string& place, uint32_t tokens) {
  final_[place] += tokens;
  return *this;
}

DPN DPNBuilder::finish(const DPNOptions& opts) {
  if (places_.empty()) throw ModelError("net has no places");
  if (transitions_.empty()) throw ModelError("net has no transitions");

  for (const auto& [from, to, mult] : arcs_) {
    auto pit = place_index_.find(from);
    auto tit = transition_index_.find(to);
    if (pit != place_index_.end() && tit != transition_index_.end()) {
      transitions_[tit->second].pre.emplace_back(pit->second, mult);
      continue;
    }
    tit = transition_index_.find(from);
    pit = place_index_.find(to);
    if (tit != transition_index_.end() && pit != place_index_.end()) {
      transitions_[tit->second].post.emplace_back(pit->second, mult);
      continue;
    }
    throw ModelError("arc " + from + " -> " + to +
                     " does not connect a place and a transition");
  }

  DPN net;
  net.pool_ = pool_;
  net.places_ = places_;
  net.transitions_ = transitions_;
  net.variables_ = variables_;
  net.place_index_ = place_index_;
  net.transition_index_ = transition_index_;
  net.variable_index_ = variable_index_;

  // Merge duplicate arcs and keep pre/post sorted by place for determinism.
  for (auto& t : net.transitions_) {
    for (auto* side : {&t.pre, &t.post}) {
      std::map<size_t, uint32_t> merged;
      for (auto& [p, m] : *side) merged[p] += m;
      side->assign(merged.begin(), merged.end());
    }
  }

  size_t silent_count = 0;
  for (size_t i = 0; i < net.transitions_.size(); ++i) {
    const Transition& t = net.transitions_[i];
    if (t.silent()) {
      ++silent_count;
      continue;
    }
    auto [it, fresh] = net.label_index_.emplace(t.label, i);
    if (!fresh)
      throw ModelError("activity label '" + t.label +
                       "' used by transitions '" + net.transitions_[it->second].id +
                       "' and '" + t.id + "'");
  }
  if (silent_count > 1 && !opts.allow_multiple_silent)
    throw ModelError("net has " + std::to_string(silent_count) +
                     " silent transitions; enable allow_multiple_silent to "
                     "accept this");

  net.initial_.assign(net.places_.size(), 0);
  net.final_.assign(net.places_.size(), 0);
  for (auto& [marking, source] :
       {std::pair{&net.initial_, &initial_}, {&net.final_, &final_}}) {
    for (const auto& [id, tokens] : *source) {
      auto it = net.place_index_.find(id);
      if (it == net.place_index_.end())
        throw ModelError("marking references unknown place '" + id + "'");
      (*marking)[it->second] = tokens;
    }
  }
  bool any_initial = std::any_of(net.initial_.begin(), net.initial_.end(),
                                 [](uint32_t c) { return c > 0; });
  bool any_final = std::any_of(net.final_.begin(), net.final_.end(),
                               [](uint32_t c) { return c > 0; });
  if (!any_initial) throw ModelError("initial marking is empty");
  if (!any_final) throw ModelError("final marking is empty");
  return net;
}

std::optional<size_t> DPN::place_index(const std::string& id) const {
  auto it = place_index_.find(id);
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> DPN::transition_index(const std::string& id) const {
  auto it = transition_index_.find(id);
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> DPN::variable_index(const std::string& name) const {
  auto it = variable_index_.find(name);
  if (it == variable_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> DPN::transition_by_label(const std::string& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, Sort> DPN::variable_sorts() const {
  std::map<std::string, Sort> sorts;
  for (const auto& v : variables_) sorts[v.name] = v.sort;
  return sorts;
}

State DPN::initial_state() const {
  State s;
  s.marking = initial_;
  for (const auto& v : variables_) s.data.emplace(v.name, v.initial);
  return s;
}

static bool sort_accepts(Sort declared, const Value& v) {
  if (v.sort() == declared) return true;
  // Integer values are acceptable wherever a rational is expected.
  return declared == Sort::Rat && v.sort() == Sort::Int;
}

Assignment DPN::complete_firing(const State& state,
                                const TransitionFiring& firing) const {
  if (firing.transition >= transitions_.size())
    throw ModelError("firing references transition #" +
                     std::to_string(firing.transition) + " out of range");
  const Transition& t = transitions_[firing.transition];
  Assignment beta = firing.beta;
  for (const auto& name : t.read_set) {
    AnnVar key{name, false};
    auto it = beta.find(key);
    if (it == beta.end()) beta.emplace(key, state.data.at(name));
  }
  for (const auto& name : t.write_set) {
    auto it = beta.find(AnnVar{name, true});
    if (it == beta.end())
      throw GuardError("firing of '" + t.id + "' misses a value for '" + name +
                       "''");
    size_t vi = variable_index_.at(name);
    if (!sort_accepts(variables_[vi].sort, it->second))
      throw GuardError("write to '" + name + "' in firing of '" + t.id +
                       "' has sort " + sort_name(it->second.sort()) +
                       ", expected " + sort_name(variables_[vi].sort));
  }
  return beta;
}

bool DPN::enabled(const State& state, const TransitionFiring& firing) const {
  const Transition& t = transitions_[firing.transition];
  for (const auto& [p, mult] : t.pre)
    if (state.marking[p] < mult) return false;
  Assignment beta = complete_firing(state, firing);
  for (const auto& name : t.read_set) {
    if (!(beta.at(AnnVar{name, false}) == state.data.at(name))) return false;
  }
  return t.guard.eval(beta);
}

State DPN::fire(const State& state, const TransitionFiring& firing) const {
  if (!enabled(state, firing))
    throw ModelError("transition '" + transitions_[firing.transition].id +
                     "' is not enabled");
  const Transition& t = transitions_[firing.transition];
  State next = state;
  for (const auto& [p, mult] : t.pre) next.marking[p] -= mult;
  for (const auto& [p, mult] : t.post) next.marking[p] += mult;
  Assignment beta = complete_firing(state, firing);
  for (const auto& name : t.write_set) {
    Value v = beta.at(AnnVar{name, true});
    size_t vi = variable_index_.at(name);
    if (variables_[vi].sort == Sort::Rat && v.sort() == Sort::Int)
      v = Value::rational(v.widen());
    next.data[name] = std::move(v);
  }
  return next;
}

DPN::Replay DPN::replay_run(const Run& run) const {
  Replay r;
  State state = initial_state();
  for (size_t i = 0; i < run.size(); ++i) {
    if (run[i].transition >= transitions_.size()) {
      r.error = "step " + std::to_string(i + 1) + ": transition index " +
                std::to_string(run[i].transition) + " out of range";
      r.final_state = state;
      return r;
    }
    TransitionFiring f = run[i];
    try {
      if (!enabled(state, f)) {
        r.error = "step " + std::to_string(i + 1) + ": '" +
                  transitions_[f.transition].id + "' is not enabled";
        r.final_state = state;
        return r;
      }
      f.beta = complete_firing(state, f);
      state = fire(state, f);
    } catch (const GuardError& e) {
      r.error = "step " + std::to_string(i + 1) + ": " + e.what();
      r.final_state = state;
      return r;
    }
    r.completed.push_back(std::move(f));
  }
  r.ok = true;
  r.final_state = state;
  r.reached_final = state.marking == final_;
  return r;
}

bool DPN::validate_run(const Run& run, bool require_final) const {
  Replay r = replay_run(run);
  return r.ok && (!require_final || r.reached_final);
}

namespace {

struct MarkingHash {
  size_t operator()(const Marking& m) const {
    size_t h = 1469598103934665603ull;
    for (uint32_t c : m) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

Exploration DPN::explore(size_t horizon, size_t node_cap) const {
  Exploration out;
  out.fireable.resize(horizon);
  std::unordered_set<Marking, MarkingHash> seen;
  std::vector<Marking> frontier{initial_};
  seen.insert(initial_);
  bool bounded = std::all_of(initial_.begin(), initial_.end(),
                             [](uint32_t c) { return c <= 1; });
  std::optional<size_t> capped_at;
  std::set<size_t> cumulative;
  bool closed = false;

  for (size_t depth = 0; depth < horizon; ++depth) {
    if (frontier.empty()) {
      // Closed: later steps cannot enable anything new.
      for (size_t k = depth; k < horizon; ++k) out.fireable[k] = cumulative;
      closed = true;
      break;
    }
    std::vector<Marking> next;
    for (const Marking& m : frontier) {
      for (size_t ti = 0; ti < transitions_.size(); ++ti) {
        const Transition& t = transitions_[ti];
        bool ok = std::all_of(
            t.pre.begin(), t.pre.end(),
            [&](const auto& pm) { return m[pm.first] >= pm.second; });
        if (!ok) continue;
        cumulative.insert(ti);
        Marking m2 = m;
        for (const auto& [p, mult] : t.pre) m2[p] -= mult;
        for (const auto& [p, mult] : t.post) m2[p] += mult;
        if (seen.count(m2)) continue;
        if (seen.size() >= node_cap) {
          if (!capped_at) capped_at = depth;
          continue;
        }
        seen.insert(m2);
        bounded = bounded && std::all_of(m2.begin(), m2.end(),
                                         [](uint32_t c) { return c <= 1; });
        next.push_back(std::move(m2));
      }
    }
    out.fireable[depth] = cumulative;
    frontier = std::move(next);
  }
  if (frontier.empty() && !capped_at) closed = true;
  if (capped_at) {
    // Dropped markings make every level from the capped depth on unreliable;
    // over-approximate those conservatively with the full transition set.
    std::set<size_t> all;
    for (size_t ti = 0; ti < transitions_.size(); ++ti) all.insert(ti);
    for (size_t k = *capped_at; k < horizon; ++k) out.fireable[k] = all;
  }
  out.complete = closed && !capped_at;
  out.one_bounded = out.complete && bounded;
  out.markings_visited = seen.size();
  return out;
}

std::optional<size_t> DPN::shortest_final_distance(size_t node_cap) const {
  if (initial_ == final_) return 0;
  std::unordered_set<Marking, MarkingHash> seen;
  std::deque<std::pair<Marking, size_t>> queue;
  seen.insert(initial_);
  queue.emplace_back(initial_, 0);
  while (!queue.empty()) {
    auto [m, d] = std::move(queue.front());
    queue.pop_front();
    for (const Transition& t : transitions_) {
      bool ok = std::all_of(
          t.pre.begin(), t.pre.end(),
          [&](const auto& pm) { return m[pm.first] >= pm.second; });
      if (!ok) continue;
      Marking m2 = m;
      for (const auto& [p, mult] : t.pre) m2[p] -= mult;
      for (const auto& [p, mult] : t.post) m2[p] += mult;
      if (m2 == final_) return d + 1;
      if (seen.size() >= node_cap) return std::nullopt;
      if (seen.insert(m2).second) queue.emplace_back(std::move(m2), d + 1);
    }
  }
  return std::nullopt;
}

std::string DPN::firing_text(const TransitionFiring& firing,
                             bool include_reads) const {
  const Transition& t = transitions_[firing.transition];
  std::ostringstream os;
  os << (t.silent() ? "tau(" + t.id + ")" : t.label);
  std::vector<std::string> parts;
  std::vector<AnnVar> keys;
  for (const auto& [k, v] : firing.beta) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    if (!k.write && !include_reads) continue;
    parts.push_back(k.name + (k.write ? "'" : "") + "=" +
                    firing.beta.at(k).display(pool_.get()));
  }
  if (!parts.empty()) {
    os << "{";
    for (size_t i = 0; i < parts.size(); ++i)
      os << (i ? ", " : "") << parts[i];
    os << "}";
  }
  return os.str();
}

}  // namespace dpncheck
