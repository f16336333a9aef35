#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>

#include "dpncheck/value.hpp"

namespace dpncheck {

// A process variable occurrence inside a guard: plain "x" reads the value
// before the transition fires, primed "x'" refers to the value written by it.
struct AnnVar {
  std::string name;
  bool write = false;

  bool operator==(const AnnVar& o) const {
    return write == o.write && name == o.name;
  }
  bool operator<(const AnnVar& o) const {
    return name != o.name ? name < o.name : write < o.write;
  }
};

struct AnnVarHash {
  size_t operator()(const AnnVar& v) const {
    return std::hash<std::string>()(v.name) * 2 + (v.write ? 1 : 0);
  }
};

// Partial assignment of annotated variables, as supplied with a transition
// firing.
using Assignment = std::unordered_map<AnnVar, Value, AnnVarHash>;

struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace guard_ast {

enum class TermKind : uint8_t { Const, Var, Add, Sub, Neg };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  Sort sort;        // result sort; Add/Sub/Neg are Int unless a side is Rat
  Value constant;   // Const
  AnnVar var;       // Var
  TermPtr lhs, rhs; // Add/Sub both, Neg lhs only
};

enum class FormKind : uint8_t { Lit, BoolVar, Cmp, Not, And, Or };
enum class CmpOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Form;
using FormPtr = std::shared_ptr<const Form>;

struct Form {
  FormKind kind;
  bool lit = false; // Lit
  AnnVar var;       // BoolVar
  CmpOp op{};       // Cmp
  TermPtr lhs, rhs; // Cmp
  FormPtr a, b;     // Not (a), And/Or (a, b)
};

TermPtr make_const(Value v);
TermPtr make_var(AnnVar v, Sort sort);
TermPtr make_add(TermPtr l, TermPtr r);
TermPtr make_sub(TermPtr l, TermPtr r);
TermPtr make_neg(TermPtr t);

FormPtr make_lit(bool b);
FormPtr make_boolvar(AnnVar v);
FormPtr make_cmp(CmpOp op, TermPtr l, TermPtr r);
FormPtr make_not(FormPtr f);
FormPtr make_and(FormPtr l, FormPtr r);
FormPtr make_or(FormPtr l, FormPtr r);

const char* cmp_op_text(CmpOp op);
CmpOp flip_cmp(CmpOp op);    // argument order swapped: x < y  ==>  y > x
CmpOp negate_cmp(CmpOp op);  // logical complement: not (x < y) ==> x >= y

}  // namespace guard_ast

// A well-sorted constraint over annotated process variables. Immutable and
// cheap to copy; the tree is exposed (root()) for the solver encoding and
// the guard-atom analysis, which both walk it structurally.
class Guard {
 public:
  Guard(); // trivially true

  explicit Guard(guard_ast::FormPtr root);

  // Parses the textual form, e.g. "x' >= 0 && (y <= 3 || !done)". Primed
  // identifiers are writes. Every variable must appear in `sorts`; string
  // literals are interned into `pool`. Throws GuardError with position info
  // on syntax or sort errors.
  static Guard parse(const std::string& text,
                     const std::map<std::string, Sort>& sorts,
                     StringPool& pool);

  const guard_ast::FormPtr& root() const { return root_; }

  bool is_true() const;

  // Process variables occurring read-annotated / write-annotated.
  std::set<std::string> read_vars() const;
  std::set<std::string> write_vars() const;

  // Evaluates under an assignment of every annotated variable the guard
  // mentions. Throws GuardError naming the variable if one is missing.
  bool eval(const Assignment& beta) const;

  // Canonical text, parseable by parse(). Strings are rendered via `pool`.
  std::string text(const StringPool* pool = nullptr) const;

  // Calls fn on every atomic subformula (Lit, BoolVar or Cmp) together with
  // the parity of negations above it (true = appears under an odd number of
  // nots).
  void visit_atoms(
      const std::function<void(const guard_ast::Form&, bool negated)>& fn) const;

 private:
  guard_ast::FormPtr root_;
};

// Conjunction of two guards, flattening trivially-true sides.
Guard guard_and(const Guard& a, const Guard& b);

}  // namespace dpncheck
