#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"

namespace dpncheck {

// Alignment costs are small non-negative integers in both profiles; int64
// with a saturating infinity is plenty.
using Cost = int64_t;
inline constexpr Cost kInfCost = std::numeric_limits<Cost>::max() / 4;

inline Cost cost_add(Cost a, Cost b) {
  if (a >= kInfCost || b >= kInfCost) return kInfCost;
  return a + b;
}

std::string cost_text(Cost c);

enum class MoveKind : uint8_t { Log, Model, Sync };

// One alignment column. Log and sync moves carry the 0-based index of the
// trace event; model and sync moves carry the firing.
struct Move {
  MoveKind kind;
  size_t event = 0;
  TransitionFiring firing{0, {}};
};

using Alignment = std::vector<Move>;

enum class ProfileKind : uint8_t { Standard, Levenshtein };

// Penalty functions determining the cost of each move kind.
class PenaltyProfile {
 public:
  static PenaltyProfile standard();
  static PenaltyProfile levenshtein();
  static std::optional<PenaltyProfile> by_name(const std::string& name);

  ProfileKind kind() const { return kind_; }
  const char* name() const;

  Cost log_move(const Event& e) const;
  Cost model_move(const DPN& net, const TransitionFiring& f) const;
  // Infinite when the labels differ (or the transition is silent); otherwise
  // counts the payload variables the model writes with a different value.
  Cost sync_move(const DPN& net, const Event& e,
                 const TransitionFiring& f) const;

  // Largest possible model-move cost over the net's transitions.
  Cost max_model_move(const DPN& net) const;

 private:
  explicit PenaltyProfile(ProfileKind k) : kind_(k) {}
  ProfileKind kind_;
};

// Total cost of an alignment's moves.
Cost alignment_cost(const DPN& net, const LogTrace& trace,
                    const Alignment& alignment, const PenaltyProfile& pf);

// Structural well-formedness: the log projection reproduces the trace and
// the model projection is a valid run reaching the final marking. Returns
// an error message, or nullopt when the alignment is proper.
std::optional<std::string> check_alignment(const DPN& net,
                                           const LogTrace& trace,
                                           const Alignment& alignment);

// (m+1) x (n+1) dynamic-programming table of optimal prefix distances
// between the trace and the run.
std::vector<std::vector<Cost>> distance_matrix(const DPN& net,
                                               const LogTrace& trace,
                                               const Run& run,
                                               const PenaltyProfile& pf);

Cost edit_distance(const DPN& net, const LogTrace& trace, const Run& run,
                   const PenaltyProfile& pf);

// Optimal alignment of the trace against this specific run, recovered from
// the distance table. Ties break log move, then model move, then sync.
Alignment reconstruct_alignment(const DPN& net, const LogTrace& trace,
                                const Run& run, const PenaltyProfile& pf);

// Two-row rendering (log row over model row) for verbose output.
std::string render_alignment(const DPN& net, const LogTrace& trace,
                             const Alignment& alignment);

}  // namespace dpncheck
