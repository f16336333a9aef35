#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"
#include "dpncheck/value.hpp"

namespace dpncheck {

// One variable-to-constant predicate, kept in two forms: a base operator
// from {>, >=, ==} for evaluation (derived operators collapse onto these,
// since a predicate and its complement split values identically) and the
// display text of its first occurrence in a guard.
struct Atom {
  enum class Op : uint8_t { Gt, Ge, Eq };
  Op op;
  Value constant;
  std::string display; // e.g. "x <= 3", variable unannotated
};

// Guard-derived comparison structure of a net's variables. A variable is
// restricted when every guard atom involving it (read or write annotated)
// compares that single variable against a constant; only those variables
// get an atom list. Variables never mentioned by a guard are restricted
// with an empty list.
struct AtomSet {
  std::map<std::string, std::vector<Atom>> atoms;
  std::set<std::string> restricted;

  bool is_restricted(const std::string& variable) const {
    return restricted.count(variable) > 0;
  }
  // Atom list of a restricted variable; empty for the rest.
  const std::vector<Atom>& atoms_for(const std::string& variable) const;
};

AtomSet extract_atoms(const DPN& net);

// True iff the value lies on the atom's satisfied side. Numeric atoms
// compare exactly across int and rational values.
bool atom_holds(const Atom& atom, const Value& value);

// True iff both values satisfy exactly the same atoms.
bool value_equiv(const Value& u1, const Value& u2,
                 const std::vector<Atom>& atoms_v);

// Canonical trace key: activity plus per-payload-variable token for each
// event, where a restricted variable contributes its atom satisfaction bits
// and any other variable its exact value. Two traces get the same signature
// iff they are equivalent up to constant comparison.
using TraceSignature = std::string;

TraceSignature signature(const LogTrace& trace, const AtomSet& atoms);

struct Cluster {
  size_t representative = 0;   // index into the unique-trace list
  std::vector<size_t> members; // unique-trace indices, input order
  uint64_t multiplicity = 0;   // summed over members
};

struct Clustering {
  std::vector<Cluster> clusters;  // in order of first appearance
  std::vector<size_t> cluster_of; // per unique trace
};

// Hash partition of deduplicated traces by signature. The representative is
// the first member encountered.
Clustering cluster_log(const std::vector<UniqueTrace>& traces,
                       const AtomSet& atoms);

}  // namespace dpncheck
