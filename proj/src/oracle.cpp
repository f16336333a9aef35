#include "dpncheck/oracle.hpp"

namespace dpncheck {

FiniteDomains& FiniteDomains::set_int_range(const std::string& variable,
                                            long lo, long hi) {
  std::vector<Value> vs;
  for (long v = lo; v <= hi; ++v) vs.push_back(Value::integer(v));
  values[variable] = std::move(vs);
  return *this;
}

namespace {

struct Searcher {
  const DPN& net;
  const FiniteDomains& domains;
  size_t max_len;
  const std::function<void(const Run&)>& sink;
  size_t node_cap;
  size_t nodes = 0;
  Run current;

  // Per transition: the written variables with their candidate values.
  std::vector<std::vector<std::pair<std::string, const std::vector<Value>*>>>
      write_plans;

  void plan() {
    write_plans.resize(net.transitions().size());
    for (size_t t = 0; t < net.transitions().size(); ++t) {
      for (const std::string& v : net.transitions()[t].write_set) {
        auto it = domains.values.find(v);
        if (it == domains.values.end() || it->second.empty())
          throw OracleError("no domain given for written variable " + v);
        write_plans[t].emplace_back(v, &it->second);
      }
    }
  }

  void visit(const State& state, size_t depth) {
    if (state.marking == net.final_marking()) sink(current);
    if (depth == max_len) return;
    for (size_t t = 0; t < net.transitions().size(); ++t) {
      const auto& plan = write_plans[t];
      // Odometer over the cartesian product of candidate writes; a single
      // empty assignment when the transition writes nothing.
      std::vector<size_t> pick(plan.size(), 0);
      while (true) {
        if (++nodes > node_cap)
          throw OracleError("run enumeration exceeded " +
                            std::to_string(node_cap) + " candidate firings");
        TransitionFiring firing{t, {}};
        for (size_t k = 0; k < plan.size(); ++k)
          firing.beta[AnnVar{plan[k].first, true}] =
              (*plan[k].second)[pick[k]];
        if (net.enabled(state, firing)) {
          State next = net.fire(state, firing);
          current.push_back(firing);
          visit(next, depth + 1);
          current.pop_back();
        }
        size_t k = 0;
        while (k < pick.size() && ++pick[k] == plan[k].second->size()) {
          pick[k] = 0;
          ++k;
        }
        if (k == pick.size()) break; // odometer wrapped (or no writes)
      }
    }
  }
};

}  // namespace

void enumerate_runs(const DPN& net, const FiniteDomains& domains,
                    size_t max_len,
                    const std::function<void(const Run&)>& sink,
                    size_t node_cap) {
  Searcher s{net, domains, max_len, sink, node_cap, {}, {}};
  s.plan();
  s.visit(net.initial_state(), 0);
}

std::vector<Run> all_runs(const DPN& net, const FiniteDomains& domains,
                          size_t max_len, size_t node_cap) {
  std::vector<Run> runs;
  enumerate_runs(
      net, domains, max_len, [&](const Run& r) { runs.push_back(r); },
      node_cap);
  return runs;
}

Cost brute_force_optimal(const DPN& net, const LogTrace& trace,
                         const PenaltyProfile& pf,
                         const FiniteDomains& domains, size_t max_len,
                         size_t node_cap) {
  Cost best = kInfCost;
  bool found = false;
  enumerate_runs(
      net, domains, max_len,
      [&](const Run& r) {
        found = true;
        best = std::min(best, edit_distance(net, trace, r, pf));
      },
      node_cap);
  if (!found)
    throw OracleError("no run of length <= " + std::to_string(max_len) +
                      " reaches the final marking");
  return best;
}

}  // namespace dpncheck
