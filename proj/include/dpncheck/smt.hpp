#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpncheck/value.hpp"

namespace dpncheck {

enum class SmtSort : uint8_t { Bool, Int, Real };

using TermRef = uint32_t;

enum class SmtOp : uint8_t {
  ConstBool, ConstInt, ConstRat, Var,
  Add, Sub, Neg, ToReal, Ite,
  Eq, Le, Lt, Ge, Gt,
  And, Or, Not, Implies
};

// Hash-consed term store: structurally equal terms share one node, so
// repeated subexpressions are built once and can be named once in the
// emitted script. Terms are immutable; refs are indices into the store.
class TermArena {
 public:
  TermRef t_bool(bool b);
  TermRef t_int(const Int& v);
  TermRef t_int(long v) { return t_int(Int(v)); }
  TermRef t_rat(const Rat& v);
  // Declares a solver variable; names must be unique within the arena.
  TermRef t_var(const std::string& name, SmtSort sort);

  TermRef add(std::vector<TermRef> xs);
  TermRef add2(TermRef a, TermRef b) { return add({a, b}); }
  TermRef sub(TermRef a, TermRef b);
  TermRef neg(TermRef a);
  TermRef ite(TermRef c, TermRef t, TermRef e);

  TermRef eq(TermRef a, TermRef b);
  TermRef le(TermRef a, TermRef b);
  TermRef lt(TermRef a, TermRef b);
  TermRef ge(TermRef a, TermRef b);
  TermRef gt(TermRef a, TermRef b);

  TermRef and_(std::vector<TermRef> xs);
  TermRef or_(std::vector<TermRef> xs);
  TermRef not_(TermRef a);
  TermRef implies(TermRef a, TermRef b);

  SmtSort sort_of(TermRef r) const;
  SmtOp op_of(TermRef r) const;
  size_t node_count() const { return nodes_.size(); }
  size_t var_count() const { return vars_.size(); }
  const std::string& var_name(size_t var_index) const;
  SmtSort var_sort(size_t var_index) const;
  // Var index when the term is a variable reference.
  std::optional<size_t> as_var(TermRef r) const;
  // True when any Real-sorted term exists (selects the solver logic).
  bool uses_reals() const;

  // Variables occurring in the term, as var indices.
  void collect_vars(TermRef r, std::vector<bool>& seen) const;

  // Evaluates under values for the arena variables (indexed by var index).
  // Bool results are Value::boolean, Int are integer, Real are rational.
  Value eval(TermRef r, const std::vector<std::optional<Value>>& env) const;

  // Renders one term as SMT-LIB 2. Nodes present in `names` are printed as
  // their name instead of being expanded (except the node the call starts
  // on, so a definition body can be printed with print_def).
  void print(std::ostream& os, TermRef r,
             const std::unordered_map<TermRef, std::string>* names = nullptr) const;
  void print_def(std::ostream& os, TermRef r,
                 const std::unordered_map<TermRef, std::string>* names) const;
  std::string to_string(TermRef r,
                        const std::unordered_map<TermRef, std::string>* names =
                            nullptr) const;

  // Picks names ("|.aux<k>|") for non-leaf nodes reachable from the roots
  // through at least `min_uses` distinct parent slots, skipping nodes too
  // small for a name to shorten the emitted script. Returned map is suitable
  // for print()/print_def(); iterate refs in increasing order when emitting
  // definitions so uses follow definitions.
  std::unordered_map<TermRef, std::string> name_shared_subterms(
      const std::vector<TermRef>& roots, size_t min_uses = 2) const;

 private:
  struct Node {
    SmtOp op;
    SmtSort sort;
    int32_t payload; // const table or var index; unused otherwise
    std::vector<TermRef> children;
  };

  struct NodeKey {
    SmtOp op;
    int32_t payload;
    std::vector<TermRef> children;
    bool operator==(const NodeKey& o) const {
      return op == o.op && payload == o.payload && children == o.children;
    }
  };
  struct NodeKeyHash {
    size_t operator()(const NodeKey& k) const {
      size_t h = static_cast<size_t>(k.op) * 31 + static_cast<size_t>(k.payload);
      for (TermRef c : k.children) h = h * 1099511628211ull + c;
      return h;
    }
  };

  TermRef intern(SmtOp op, SmtSort sort, int32_t payload,
                 std::vector<TermRef> children);
  TermRef coerce_real(TermRef r);
  void unify_numeric(TermRef& a, TermRef& b);
  const Node& node(TermRef r) const { return nodes_[r]; }

  std::vector<Node> nodes_;
  std::unordered_map<NodeKey, TermRef, NodeKeyHash> index_;
  std::vector<Int> int_consts_;
  std::unordered_map<std::string, int32_t> int_const_index_;
  std::vector<Rat> rat_consts_;
  std::unordered_map<std::string, int32_t> rat_const_index_;
  std::vector<std::pair<std::string, SmtSort>> vars_;
  std::unordered_map<std::string, TermRef> var_index_;
};

const char* smt_sort_name(SmtSort s);

}  // namespace dpncheck
