#include "dpncheck/cluster.hpp"

#include <optional>
#include <unordered_map>

#include "dpncheck/guard.hpp"

namespace dpncheck {

namespace {

using guard_ast::CmpOp;
using guard_ast::Form;
using guard_ast::FormKind;
using guard_ast::Term;
using guard_ast::TermKind;
using guard_ast::TermPtr;

void term_vars(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  switch (t->kind) {
    case TermKind::Const:
      return;
    case TermKind::Var:
      out.insert(t->var.name);
      return;
    case TermKind::Neg:
      term_vars(t->lhs, out);
      return;
    case TermKind::Add:
    case TermKind::Sub:
      term_vars(t->lhs, out);
      term_vars(t->rhs, out);
      return;
  }
}

// Folds a variable-free term to its constant value; nullopt when a variable
// occurs. Mixed int/rational arithmetic widens exactly.
std::optional<Value> const_term_value(const TermPtr& t) {
  if (!t) return std::nullopt;
  switch (t->kind) {
    case TermKind::Const:
      return t->constant;
    case TermKind::Var:
      return std::nullopt;
    case TermKind::Neg: {
      auto v = const_term_value(t->lhs);
      if (!v) return std::nullopt;
      if (v->sort() == Sort::Int) return Value::integer(-v->as_int());
      return Value::rational(-v->widen());
    }
    case TermKind::Add:
    case TermKind::Sub: {
      auto l = const_term_value(t->lhs);
      auto r = const_term_value(t->rhs);
      if (!l || !r) return std::nullopt;
      bool add = t->kind == TermKind::Add;
      if (l->sort() == Sort::Int && r->sort() == Sort::Int)
        return Value::integer(add ? Int(l->as_int() + r->as_int())
                                  : Int(l->as_int() - r->as_int()));
      return Value::rational(add ? Rat(l->widen() + r->widen())
                                 : Rat(l->widen() - r->widen()));
    }
  }
  return std::nullopt;
}

// Exact three-way numeric comparison across int and rational values.
int num_cmp(const Value& a, const Value& b) {
  if (a.sort() == Sort::Int && b.sort() == Sort::Int) {
    if (a.as_int() < b.as_int()) return -1;
    return a.as_int() > b.as_int() ? 1 : 0;
  }
  Rat x = a.widen();
  Rat y = b.widen();
  if (x < y) return -1;
  return x > y ? 1 : 0;
}

std::string constant_text(const Value& c, const StringPool* pool) {
  if (c.sort() == Sort::String && pool)
    return "\"" + pool->spell(c.as_string()) + "\"";
  return c.display(pool);
}

// Accumulates atoms per variable and the set of variables disqualified by a
// non-constant comparison.
struct Collector {
  const StringPool* pool;
  std::map<std::string, std::vector<Atom>> atoms;
  std::map<std::string, std::set<std::string>> seen;
  std::set<std::string> unrestricted;

  void add(const std::string& var, Atom::Op op, Value constant,
           std::string display) {
    std::string key =
        std::string(1, static_cast<char>('0' + static_cast<int>(op))) + "|" +
        constant.key();
    if (!seen[var].insert(key).second) return;
    atoms[var].push_back(Atom{op, std::move(constant), std::move(display)});
  }

  void visit(const Form& f) {
    switch (f.kind) {
      case FormKind::Lit:
        return;
      case FormKind::BoolVar:
        // A bare boolean occurrence is the comparison v == true; negation
        // parity does not matter since complements split values alike.
        add(f.var.name, Atom::Op::Eq, Value::boolean(true),
            f.var.name + " == true");
        return;
      case FormKind::Cmp:
        comparison(f);
        return;
      case FormKind::Not:
      case FormKind::And:
      case FormKind::Or:
        return; // never passed to the atom callback
    }
  }

  void comparison(const Form& f) {
    std::set<std::string> lv, rv;
    term_vars(f.lhs, lv);
    term_vars(f.rhs, rv);
    if (lv.empty() && rv.empty()) return; // constant-only, involves nobody

    // The variable-to-constant shape: one side a bare variable, the other
    // free of variables. A constant on the left is flipped around.
    const Term* vside = nullptr;
    std::optional<Value> cval;
    CmpOp op = f.op;
    if (f.lhs->kind == TermKind::Var && rv.empty()) {
      vside = f.lhs.get();
      cval = const_term_value(f.rhs);
    } else if (f.rhs->kind == TermKind::Var && lv.empty()) {
      vside = f.rhs.get();
      cval = const_term_value(f.lhs);
      op = guard_ast::flip_cmp(op);
    }
    if (!vside || !cval) {
      for (const auto& v : lv) unrestricted.insert(v);
      for (const auto& v : rv) unrestricted.insert(v);
      return;
    }

    // Derived operators collapse onto the base set {>, >=, ==}: an atom and
    // its complement carve the value space identically.
    Atom::Op base{};
    switch (op) {
      case CmpOp::Gt:
        base = Atom::Op::Gt;
        break;
      case CmpOp::Ge:
        base = Atom::Op::Ge;
        break;
      case CmpOp::Lt:
        base = Atom::Op::Ge;
        break;
      case CmpOp::Le:
        base = Atom::Op::Gt;
        break;
      case CmpOp::Eq:
      case CmpOp::Ne:
        base = Atom::Op::Eq;
        break;
    }
    const std::string& name = vside->var.name;
    std::string display = name + " " + guard_ast::cmp_op_text(op) + " " +
                          constant_text(*cval, pool);
    add(name, base, std::move(*cval), std::move(display));
  }
};

}  // namespace

const std::vector<Atom>& AtomSet::atoms_for(const std::string& variable) const {
  static const std::vector<Atom> empty;
  auto it = atoms.find(variable);
  return it == atoms.end() ? empty : it->second;
}

AtomSet extract_atoms(const DPN& net) {
  Collector c;
  c.pool = net.pool().get();
  for (const Transition& t : net.transitions())
    t.guard.visit_atoms(
        [&](const Form& f, bool /*negated*/) { c.visit(f); });

  AtomSet out;
  for (const VariableDecl& v : net.variables()) {
    if (c.unrestricted.count(v.name)) continue;
    out.restricted.insert(v.name);
    auto it = c.atoms.find(v.name);
    if (it != c.atoms.end())
      out.atoms[v.name] = std::move(it->second);
    else
      out.atoms[v.name] = {};
  }
  return out;
}

bool atom_holds(const Atom& atom, const Value& value) {
  if (atom.op == Atom::Op::Eq) {
    Sort cs = atom.constant.sort();
    Sort vs = value.sort();
    if (cs == Sort::Bool || cs == Sort::String || vs == Sort::Bool ||
        vs == Sort::String)
      return value == atom.constant;
    return num_cmp(value, atom.constant) == 0;
  }
  int c = num_cmp(value, atom.constant);
  return atom.op == Atom::Op::Gt ? c > 0 : c >= 0;
}

bool value_equiv(const Value& u1, const Value& u2,
                 const std::vector<Atom>& atoms_v) {
  for (const Atom& a : atoms_v)
    if (atom_holds(a, u1) != atom_holds(a, u2)) return false;
  return true;
}

TraceSignature signature(const LogTrace& trace, const AtomSet& atoms) {
  // Length-prefixed pieces keep activities and variable names from bleeding
  // into each other.
  std::string sig;
  for (const Event& e : trace.events) {
    sig += std::to_string(e.activity.size());
    sig += ':';
    sig += e.activity;
    sig += '(';
    for (const auto& [name, val] : e.payload) {
      sig += std::to_string(name.size());
      sig += ':';
      sig += name;
      sig += '=';
      if (atoms.is_restricted(name)) {
        sig += 'b';
        for (const Atom& a : atoms.atoms_for(name))
          sig += atom_holds(a, val) ? '1' : '0';
      } else {
        sig += val.key();
      }
      sig += ';';
    }
    sig += ')';
  }
  return sig;
}

Clustering cluster_log(const std::vector<UniqueTrace>& traces,
                       const AtomSet& atoms) {
  Clustering out;
  out.cluster_of.resize(traces.size(), 0);
  std::unordered_map<TraceSignature, size_t> index;
  for (size_t i = 0; i < traces.size(); ++i) {
    TraceSignature sig = signature(traces[i].trace, atoms);
    auto [it, fresh] = index.emplace(std::move(sig), out.clusters.size());
    if (fresh) {
      Cluster c;
      c.representative = i;
      out.clusters.push_back(std::move(c));
    }
    Cluster& c = out.clusters[it->second];
    c.members.push_back(i);
    c.multiplicity += traces[i].multiplicity;
    out.cluster_of[i] = it->second;
  }
  return out;
}

}  // namespace dpncheck
