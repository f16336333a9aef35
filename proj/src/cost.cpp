#include "dpncheck/cost.hpp"

#include <algorithm>
#include <sstream>

namespace dpncheck {

std::string cost_text(Cost c) {
  return c >= kInfCost ? "inf" : std::to_string(c);
}

PenaltyProfile PenaltyProfile::standard() {
  return PenaltyProfile(ProfileKind::Standard);
}

PenaltyProfile PenaltyProfile::levenshtein() {
  return PenaltyProfile(ProfileKind::Levenshtein);
}

std::optional<PenaltyProfile> PenaltyProfile::by_name(const std::string& name) {
  if (name == "standard") return standard();
  if (name == "levenshtein") return levenshtein();
  return std::nullopt;
}

const char* PenaltyProfile::name() const {
  return kind_ == ProfileKind::Standard ? "standard" : "levenshtein";
}

Cost PenaltyProfile::log_move(const Event&) const { return 1; }

Cost PenaltyProfile::model_move(const DPN& net,
                                const TransitionFiring& f) const {
  const Transition& t = net.transitions()[f.transition];
  if (kind_ == ProfileKind::Levenshtein) return 1;
  if (t.silent()) return 0;
  return static_cast<Cost>(t.write_set.size()) + 1;
}

Cost PenaltyProfile::sync_move(const DPN& net, const Event& e,
                               const TransitionFiring& f) const {
  const Transition& t = net.transitions()[f.transition];
  if (t.silent() || t.label != e.activity) return kInfCost;
  if (kind_ == ProfileKind::Levenshtein) return 0;
  Cost mismatches = 0;
  for (const auto& name : t.write_set) {
    auto it = e.payload.find(name);
    if (it == e.payload.end()) continue;
    auto bit = f.beta.find(AnnVar{name, true});
    if (bit == f.beta.end() || !(bit->second == it->second)) ++mismatches;
  }
  return mismatches;
}

Cost PenaltyProfile::max_model_move(const DPN& net) const {
  Cost best = 0;
  for (const Transition& t : net.transitions()) {
    Cost c = kind_ == ProfileKind::Levenshtein
                 ? 1
                 : (t.silent() ? 0 : static_cast<Cost>(t.write_set.size()) + 1);
    best = std::max(best, c);
  }
  return best;
}

Cost alignment_cost(const DPN& net, const LogTrace& trace,
                    const Alignment& alignment, const PenaltyProfile& pf) {
  Cost total = 0;
  for (const Move& mv : alignment) {
    switch (mv.kind) {
      case MoveKind::Log:
        total = cost_add(total, pf.log_move(trace.events.at(mv.event)));
        break;
      case MoveKind::Model:
        total = cost_add(total, pf.model_move(net, mv.firing));
        break;
      case MoveKind::Sync:
        total = cost_add(
            total, pf.sync_move(net, trace.events.at(mv.event), mv.firing));
        break;
    }
  }
  return total;
}

std::optional<std::string> check_alignment(const DPN& net,
                                           const LogTrace& trace,
                                           const Alignment& alignment) {
  size_t next_event = 0;
  Run run;
  for (size_t i = 0; i < alignment.size(); ++i) {
    const Move& mv = alignment[i];
    if (mv.kind != MoveKind::Model) {
      if (mv.event != next_event)
        return "move " + std::to_string(i + 1) + " consumes event " +
               std::to_string(mv.event + 1) + ", expected " +
               std::to_string(next_event + 1);
      ++next_event;
    }
    if (mv.kind != MoveKind::Log) run.push_back(mv.firing);
  }
  if (next_event != trace.events.size())
    return "alignment consumes " + std::to_string(next_event) + " of " +
           std::to_string(trace.events.size()) + " events";
  DPN::Replay r = net.replay_run(run);
  if (!r.ok) return "model projection is not a run: " + r.error;
  if (!r.reached_final) return "model projection does not reach the final marking";
  return std::nullopt;
}

std::vector<std::vector<Cost>> distance_matrix(const DPN& net,
                                               const LogTrace& trace,
                                               const Run& run,
                                               const PenaltyProfile& pf) {
  size_t m = trace.events.size(), n = run.size();
  std::vector<std::vector<Cost>> d(m + 1, std::vector<Cost>(n + 1, 0));
  for (size_t i = 1; i <= m; ++i)
    d[i][0] = cost_add(d[i - 1][0], pf.log_move(trace.events[i - 1]));
  for (size_t j = 1; j <= n; ++j)
    d[0][j] = cost_add(d[0][j - 1], pf.model_move(net, run[j - 1]));
  for (size_t i = 1; i <= m; ++i) {
    for (size_t j = 1; j <= n; ++j) {
      Cost viaLog = cost_add(d[i - 1][j], pf.log_move(trace.events[i - 1]));
      Cost viaModel = cost_add(d[i][j - 1], pf.model_move(net, run[j - 1]));
      Cost viaSync = cost_add(
          d[i - 1][j - 1], pf.sync_move(net, trace.events[i - 1], run[j - 1]));
      d[i][j] = std::min({viaLog, viaModel, viaSync});
    }
  }
  return d;
}

Cost edit_distance(const DPN& net, const LogTrace& trace, const Run& run,
                   const PenaltyProfile& pf) {
  return distance_matrix(net, trace, run, pf).back().back();
}

Alignment reconstruct_alignment(const DPN& net, const LogTrace& trace,
                                const Run& run, const PenaltyProfile& pf) {
  auto d = distance_matrix(net, trace, run, pf);
  size_t i = trace.events.size(), j = run.size();
  Alignment rev;
  while (i > 0 || j > 0) {
    if (i > 0 &&
        d[i][j] == cost_add(d[i - 1][j], pf.log_move(trace.events[i - 1]))) {
      rev.push_back({MoveKind::Log, i - 1, {0, {}}});
      --i;
    } else if (j > 0 && d[i][j] == cost_add(d[i][j - 1],
                                            pf.model_move(net, run[j - 1]))) {
      rev.push_back({MoveKind::Model, 0, run[j - 1]});
      --j;
    } else if (i > 0 && j > 0) {
      rev.push_back({MoveKind::Sync, i - 1, run[j - 1]});
      --i;
      --j;
    } else {
      throw std::logic_error("distance table admits no predecessor");
    }
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::string render_alignment(const DPN& net, const LogTrace& trace,
                             const Alignment& alignment) {
  std::vector<std::string> top, bottom;
  for (const Move& mv : alignment) {
    std::string log_cell = ">>", model_cell = ">>";
    if (mv.kind != MoveKind::Model) {
      const Event& e = trace.events.at(mv.event);
      std::ostringstream os;
      os << e.activity;
      if (!e.payload.empty()) {
        os << "{";
        bool first = true;
        for (const auto& [k, v] : e.payload) {
          os << (first ? "" : ", ") << k << "=" << v.display(net.pool().get());
          first = false;
        }
        os << "}";
      }
      log_cell = os.str();
    }
    if (mv.kind != MoveKind::Log) model_cell = net.firing_text(mv.firing);
    top.push_back(log_cell);
    bottom.push_back(model_cell);
  }
  std::ostringstream l1, l2;
  l1 << "log:   ";
  l2 << "model: ";
  for (size_t k = 0; k < top.size(); ++k) {
    size_t w = std::max(top[k].size(), bottom[k].size());
    l1 << "| " << top[k] << std::string(w - top[k].size(), ' ') << " ";
    l2 << "| " << bottom[k] << std::string(w - bottom[k].size(), ' ') << " ";
  }
  l1 << "|";
  l2 << "|";
  return l1.str() + "\n" + l2.str();
}

}  // namespace dpncheck
