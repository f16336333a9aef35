#include "dpncheck/smt.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpncheck {

const char* smt_sort_name(SmtSort s) {
  switch (s) {
    case SmtSort::Bool: return "Bool";
    case SmtSort::Int: return "Int";
    case SmtSort::Real: return "Real";
  }
  return "?";
}

TermRef TermArena::intern(SmtOp op, SmtSort sort, int32_t payload,
                          std::vector<TermRef> children) {
  NodeKey key{op, payload, children};
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  TermRef ref = static_cast<TermRef>(nodes_.size());
  nodes_.push_back(Node{op, sort, payload, std::move(children)});
  index_.emplace(std::move(key), ref);
  return ref;
}

TermRef TermArena::t_bool(bool b) {
  return intern(SmtOp::ConstBool, SmtSort::Bool, b ? 1 : 0, {});
}

TermRef TermArena::t_int(const Int& v) {
  std::string key = v.str();
  auto it = int_const_index_.find(key);
  int32_t idx;
  if (it != int_const_index_.end()) {
    idx = it->second;
  } else {
    idx = static_cast<int32_t>(int_consts_.size());
    int_consts_.push_back(v);
    int_const_index_.emplace(std::move(key), idx);
  }
  return intern(SmtOp::ConstInt, SmtSort::Int, idx, {});
}

TermRef TermArena::t_rat(const Rat& v) {
  std::string key = rat_to_string(v);
  auto it = rat_const_index_.find(key);
  int32_t idx;
  if (it != rat_const_index_.end()) {
    idx = it->second;
  } else {
    idx = static_cast<int32_t>(rat_consts_.size());
    rat_consts_.push_back(v);
    rat_const_index_.emplace(std::move(key), idx);
  }
  return intern(SmtOp::ConstRat, SmtSort::Real, idx, {});
}

TermRef TermArena::t_var(const std::string& name, SmtSort sort) {
  auto it = var_index_.find(name);
  if (it != var_index_.end()) {
    if (vars_[nodes_[it->second].payload].second != sort)
      throw std::logic_error("variable '" + name + "' redeclared with a new sort");
    return it->second;
  }
  int32_t idx = static_cast<int32_t>(vars_.size());
  vars_.emplace_back(name, sort);
  TermRef ref = intern(SmtOp::Var, sort, idx, {});
  var_index_.emplace(name, ref);
  return ref;
}

TermRef TermArena::coerce_real(TermRef r) {
  if (sort_of(r) == SmtSort::Real) return r;
  if (sort_of(r) != SmtSort::Int)
    throw std::logic_error("to_real applied to a Bool term");
  if (op_of(r) == SmtOp::ConstInt)
    return t_rat(Rat(int_consts_[node(r).payload]));
  return intern(SmtOp::ToReal, SmtSort::Real, 0, {r});
}

void TermArena::unify_numeric(TermRef& a, TermRef& b) {
  SmtSort sa = sort_of(a), sb = sort_of(b);
  if (sa == SmtSort::Bool || sb == SmtSort::Bool)
    throw std::logic_error("numeric operation on a Bool term");
  if (sa == sb) return;
  a = coerce_real(a);
  b = coerce_real(b);
}

TermRef TermArena::add(std::vector<TermRef> xs) {
  if (xs.empty()) return t_int(0);
  if (xs.size() == 1) return xs[0];
  bool real = std::any_of(xs.begin(), xs.end(), [&](TermRef r) {
    return sort_of(r) == SmtSort::Real;
  });
  if (real)
    for (TermRef& r : xs) r = coerce_real(r);
  return intern(SmtOp::Add, real ? SmtSort::Real : SmtSort::Int, 0,
                std::move(xs));
}

TermRef TermArena::sub(TermRef a, TermRef b) {
  unify_numeric(a, b);
  return intern(SmtOp::Sub, sort_of(a), 0, {a, b});
}

TermRef TermArena::neg(TermRef a) {
  if (sort_of(a) == SmtSort::Bool)
    throw std::logic_error("negation of a Bool term");
  return intern(SmtOp::Neg, sort_of(a), 0, {a});
}

TermRef TermArena::ite(TermRef c, TermRef t, TermRef e) {
  if (sort_of(c) != SmtSort::Bool) throw std::logic_error("ite on non-Bool");
  if (sort_of(t) != sort_of(e)) {
    if (sort_of(t) == SmtSort::Bool || sort_of(e) == SmtSort::Bool)
      throw std::logic_error("ite branches of mixed sorts");
    t = coerce_real(t);
    e = coerce_real(e);
  }
  return intern(SmtOp::Ite, sort_of(t), 0, {c, t, e});
}

TermRef TermArena::eq(TermRef a, TermRef b) {
  if (sort_of(a) != sort_of(b)) unify_numeric(a, b);
  return intern(SmtOp::Eq, SmtSort::Bool, 0, {a, b});
}

TermRef TermArena::le(TermRef a, TermRef b) {
  unify_numeric(a, b);
  return intern(SmtOp::Le, SmtSort::Bool, 0, {a, b});
}

TermRef TermArena::lt(TermRef a, TermRef b) {
  unify_numeric(a, b);
  return intern(SmtOp::Lt, SmtSort::Bool, 0, {a, b});
}

TermRef TermArena::ge(TermRef a, TermRef b) {
  unify_numeric(a, b);
  return intern(SmtOp::Ge, SmtSort::Bool, 0, {a, b});
}

TermRef TermArena::gt(TermRef a, TermRef b) {
  unify_numeric(a, b);
  return intern(SmtOp::Gt, SmtSort::Bool, 0, {a, b});
}

TermRef TermArena::and_(std::vector<TermRef> xs) {
  std::vector<TermRef> kept;
  for (TermRef r : xs) {
    if (op_of(r) == SmtOp::ConstBool) {
      if (node(r).payload == 0) return t_bool(false);
      continue;
    }
    kept.push_back(r);
  }
  if (kept.empty()) return t_bool(true);
  if (kept.size() == 1) return kept[0];
  return intern(SmtOp::And, SmtSort::Bool, 0, std::move(kept));
}

TermRef TermArena::or_(std::vector<TermRef> xs) {
  std::vector<TermRef> kept;
  for (TermRef r : xs) {
    if (op_of(r) == SmtOp::ConstBool) {
      if (node(r).payload == 1) return t_bool(true);
      continue;
    }
    kept.push_back(r);
  }
  if (kept.empty()) return t_bool(false);
  if (kept.size() == 1) return kept[0];
  return intern(SmtOp::Or, SmtSort::Bool, 0, std::move(kept));
}

TermRef TermArena::not_(TermRef a) {
  if (sort_of(a) != SmtSort::Bool) throw std::logic_error("not on non-Bool");
  if (op_of(a) == SmtOp::ConstBool) return t_bool(node(a).payload == 0);
  return intern(SmtOp::Not, SmtSort::Bool, 0, {a});
}

TermRef TermArena::implies(TermRef a, TermRef b) {
  if (sort_of(a) != SmtSort::Bool || sort_of(b) != SmtSort::Bool)
    throw std::logic_error("implies on non-Bool");
  if (op_of(a) == SmtOp::ConstBool) return node(a).payload ? b : t_bool(true);
  return intern(SmtOp::Implies, SmtSort::Bool, 0, {a, b});
}

SmtSort TermArena::sort_of(TermRef r) const { return nodes_.at(r).sort; }
SmtOp TermArena::op_of(TermRef r) const { return nodes_.at(r).op; }

const std::string& TermArena::var_name(size_t var_index) const {
  return vars_.at(var_index).first;
}

SmtSort TermArena::var_sort(size_t var_index) const {
  return vars_.at(var_index).second;
}

std::optional<size_t> TermArena::as_var(TermRef r) const {
  const Node& nd = node(r);
  if (nd.op != SmtOp::Var) return std::nullopt;
  return static_cast<size_t>(nd.payload);
}

bool TermArena::uses_reals() const {
  for (const Node& nd : nodes_)
    if (nd.sort == SmtSort::Real) return true;
  return false;
}

void TermArena::collect_vars(TermRef r, std::vector<bool>& seen) const {
  const Node& nd = node(r);
  if (nd.op == SmtOp::Var) {
    if (seen.size() < vars_.size()) seen.resize(vars_.size(), false);
    seen[nd.payload] = true;
    return;
  }
  for (TermRef c : nd.children) collect_vars(c, seen);
}

Value TermArena::eval(TermRef r,
                      const std::vector<std::optional<Value>>& env) const {
  const Node& nd = node(r);
  auto num = [&](TermRef c) { return eval(c, env); };
  switch (nd.op) {
    case SmtOp::ConstBool: return Value::boolean(nd.payload == 1);
    case SmtOp::ConstInt: return Value::integer(int_consts_[nd.payload]);
    case SmtOp::ConstRat: return Value::rational(rat_consts_[nd.payload]);
    case SmtOp::Var: {
      const auto& v = env.at(nd.payload);
      if (!v)
        throw std::logic_error("no value for variable '" +
                               vars_[nd.payload].first + "'");
      return *v;
    }
    case SmtOp::ToReal: return Value::rational(num(nd.children[0]).widen());
    case SmtOp::Neg: {
      Value v = num(nd.children[0]);
      return v.sort() == Sort::Int ? Value::integer(-v.as_int())
                                   : Value::rational(-v.as_rat());
    }
    case SmtOp::Add:
    case SmtOp::Sub: {
      if (nd.sort == SmtSort::Int) {
        Int acc = num(nd.children[0]).as_int();
        for (size_t i = 1; i < nd.children.size(); ++i) {
          Int rhs = num(nd.children[i]).as_int();
          if (nd.op == SmtOp::Add) acc += rhs; else acc -= rhs;
        }
        return Value::integer(acc);
      }
      Rat acc = num(nd.children[0]).widen();
      for (size_t i = 1; i < nd.children.size(); ++i) {
        Rat rhs = num(nd.children[i]).widen();
        if (nd.op == SmtOp::Add) acc += rhs; else acc -= rhs;
      }
      return Value::rational(acc);
    }
    case SmtOp::Ite:
      return num(nd.children[0]).as_bool() ? num(nd.children[1])
                                           : num(nd.children[2]);
    case SmtOp::Eq: {
      Value a = num(nd.children[0]), b = num(nd.children[1]);
      if (a.sort() == Sort::Bool) return Value::boolean(a.as_bool() == b.as_bool());
      return Value::boolean(a.widen() == b.widen());
    }
    case SmtOp::Le:
    case SmtOp::Lt:
    case SmtOp::Ge:
    case SmtOp::Gt: {
      Rat a = num(nd.children[0]).widen(), b = num(nd.children[1]).widen();
      switch (nd.op) {
        case SmtOp::Le: return Value::boolean(a <= b);
        case SmtOp::Lt: return Value::boolean(a < b);
        case SmtOp::Ge: return Value::boolean(a >= b);
        default: return Value::boolean(a > b);
      }
    }
    case SmtOp::And: {
      for (TermRef c : nd.children)
        if (!num(c).as_bool()) return Value::boolean(false);
      return Value::boolean(true);
    }
    case SmtOp::Or: {
      for (TermRef c : nd.children)
        if (num(c).as_bool()) return Value::boolean(true);
      return Value::boolean(false);
    }
    case SmtOp::Not: return Value::boolean(!num(nd.children[0]).as_bool());
    case SmtOp::Implies:
      return Value::boolean(!num(nd.children[0]).as_bool() ||
                            num(nd.children[1]).as_bool());
  }
  throw std::logic_error("bad term");
}

namespace {

const char* op_symbol(SmtOp op) {
  switch (op) {
    case SmtOp::Add: return "+";
    case SmtOp::Sub: return "-";
    case SmtOp::Neg: return "-";
    case SmtOp::ToReal: return "to_real";
    case SmtOp::Ite: return "ite";
    case SmtOp::Eq: return "=";
    case SmtOp::Le: return "<=";
    case SmtOp::Lt: return "<";
    case SmtOp::Ge: return ">=";
    case SmtOp::Gt: return ">";
    case SmtOp::And: return "and";
    case SmtOp::Or: return "or";
    case SmtOp::Not: return "not";
    case SmtOp::Implies: return "=>";
    default: return nullptr;
  }
}

}  // namespace

void TermArena::print_def(
    std::ostream& os, TermRef r,
    const std::unordered_map<TermRef, std::string>* names) const {
  const Node& nd = node(r);
  switch (nd.op) {
    case SmtOp::ConstBool:
      os << (nd.payload ? "true" : "false");
      return;
    case SmtOp::ConstInt: {
      const Int& v = int_consts_[nd.payload];
      if (v < 0)
        os << "(- " << Int(-v).str() << ")";
      else
        os << v.str();
      return;
    }
    case SmtOp::ConstRat: {
      const Rat& v = rat_consts_[nd.payload];
      Int num = boost::multiprecision::numerator(v);
      Int den = boost::multiprecision::denominator(v);
      bool neg = num < 0;
      if (neg) num = -num;
      if (neg) os << "(- ";
      if (den == 1)
        os << num.str() << ".0";
      else
        os << "(/ " << num.str() << ".0 " << den.str() << ".0)";
      if (neg) os << ")";
      return;
    }
    case SmtOp::Var:
      os << vars_[nd.payload].first;
      return;
    default: {
      os << "(" << op_symbol(nd.op);
      for (TermRef c : nd.children) {
        os << " ";
        print(os, c, names);
      }
      os << ")";
      return;
    }
  }
}

void TermArena::print(
    std::ostream& os, TermRef r,
    const std::unordered_map<TermRef, std::string>* names) const {
  if (names) {
    auto it = names->find(r);
    if (it != names->end()) {
      os << it->second;
      return;
    }
  }
  print_def(os, r, names);
}

std::string TermArena::to_string(
    TermRef r, const std::unordered_map<TermRef, std::string>* names) const {
  std::ostringstream os;
  print(os, r, names);
  return os.str();
}

std::unordered_map<TermRef, std::string> TermArena::name_shared_subterms(
    const std::vector<TermRef>& roots, size_t min_uses) const {
  // Count one use per parent slot (hash-consing makes a term built twice the
  // same ref, so counts accumulate across all parents).
  std::vector<uint32_t> uses(nodes_.size(), 0);
  std::vector<bool> visited(nodes_.size(), false);
  std::vector<TermRef> stack(roots.begin(), roots.end());
  for (TermRef r : roots) ++uses[r];
  while (!stack.empty()) {
    TermRef r = stack.back();
    stack.pop_back();
    if (visited[r]) continue;
    visited[r] = true;
    for (TermRef c : node(r).children) {
      ++uses[c];
      stack.push_back(c);
    }
  }
  // Name a node only when doing so pays: it must be referenced from at least
  // min_uses slots and big enough that replacing all but one occurrence by a
  // short name beats the cost of the extra declaration. Effective size is
  // counted with already-named descendants collapsed to one node, walking in
  // ref order (children precede parents in the arena).
  constexpr size_t kMinEffectiveNodes = 8;
  std::unordered_map<TermRef, std::string> names;
  std::vector<uint32_t> weight(nodes_.size(), 1);
  size_t k = 0;
  for (size_t r = 0; r < nodes_.size(); ++r) {
    if (!visited[r] || nodes_[r].children.empty()) continue;
    uint32_t w = 1;
    for (TermRef c : nodes_[r].children)
      w += names.count(c) ? 1 : weight[c];
    weight[r] = w;
    if (uses[r] >= min_uses && w >= kMinEffectiveNodes) {
      names.emplace(static_cast<TermRef>(r),
                    "|.aux" + std::to_string(k++) + "|");
      weight[r] = 1;
    }
  }
  return names;
}

}  // namespace dpncheck
