#include "dpncheck/encoder.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace dpncheck {

size_t compute_bound(const DPN& net, size_t trace_len, size_t exploration_cap) {
  auto d = net.shortest_final_distance(exploration_cap);
  if (!d)
    throw EncodeError(
        "final marking is unreachable from the initial marking in the control "
        "skeleton");
  return trace_len + *d;
}

namespace {

SmtSort smt_sort_for(Sort s) {
  switch (s) {
    case Sort::Bool: return SmtSort::Bool;
    case Sort::Int: return SmtSort::Int;
    case Sort::Rat: return SmtSort::Real;
    case Sort::String: return SmtSort::Int; // interned code
  }
  return SmtSort::Int;
}

// Builds everything for one trace; a plain struct of locals shared by the
// construction helpers.
struct Builder {
  const DPN& net;
  const LogTrace& trace;
  const PenaltyProfile& pf;
  const EncodeOptions& opts;
  Encoding& enc;
  TermArena& a;

  Builder(const DPN& n, const LogTrace& t, const PenaltyProfile& p,
          const EncodeOptions& o, Encoding& e)
      : net(n), trace(t), pf(p), opts(o), enc(e), a(e.arena) {}

  void assert_in(const std::string& group, TermRef term) {
    enc.assertions.emplace_back(group, term);
    ++enc.group_counts[group];
  }

  TermRef value_const(const Value& v, SmtSort target) {
    switch (v.sort()) {
      case Sort::Bool: return a.t_bool(v.as_bool());
      case Sort::Int:
        return target == SmtSort::Real ? a.t_rat(Rat(v.as_int()))
                                       : a.t_int(v.as_int());
      case Sort::Rat: return a.t_rat(v.as_rat());
      case Sort::String: return a.t_int(Int(v.as_string()));
    }
    throw EncodeError("bad value sort");
  }

  // Guard of transition t at step i: reads refer to the data variables of
  // step i-1, writes to those of step i.
  TermRef data_ref(size_t i, const AnnVar& v) {
    auto vi = net.variable_index(v.name);
    if (!vi) throw EncodeError("guard references unknown variable " + v.name);
    return enc.data[v.write ? i : i - 1][*vi];
  }

  TermRef chi_term(const guard_ast::TermPtr& t, size_t i) {
    using namespace guard_ast;
    switch (t->kind) {
      case TermKind::Const:
        return value_const(t->constant, smt_sort_for(t->sort));
      case TermKind::Var: return data_ref(i, t->var);
      case TermKind::Add: return a.add2(chi_term(t->lhs, i), chi_term(t->rhs, i));
      case TermKind::Sub: return a.sub(chi_term(t->lhs, i), chi_term(t->rhs, i));
      case TermKind::Neg: return a.neg(chi_term(t->lhs, i));
    }
    throw EncodeError("bad guard term");
  }

  TermRef chi(const guard_ast::FormPtr& f, size_t i) {
    using namespace guard_ast;
    switch (f->kind) {
      case FormKind::Lit: return a.t_bool(f->lit);
      case FormKind::BoolVar: return data_ref(i, f->var);
      case FormKind::Not: return a.not_(chi(f->a, i));
      case FormKind::And: return a.and_({chi(f->a, i), chi(f->b, i)});
      case FormKind::Or: return a.or_({chi(f->a, i), chi(f->b, i)});
      case FormKind::Cmp: {
        TermRef l = chi_term(f->lhs, i), r = chi_term(f->rhs, i);
        switch (f->op) {
          case CmpOp::Eq: return a.eq(l, r);
          case CmpOp::Ne: return a.not_(a.eq(l, r));
          case CmpOp::Lt: return a.lt(l, r);
          case CmpOp::Le: return a.le(l, r);
          case CmpOp::Gt: return a.gt(l, r);
          case CmpOp::Ge: return a.ge(l, r);
        }
      }
    }
    throw EncodeError("bad guard form");
  }

  void build() {
    const auto& T = net.transitions();
    const auto& P = net.places();
    const auto& V = net.variables();
    size_t m = enc.m, n = enc.n;

    Exploration ex;
    bool have_ex = false;
    if ((opts.restrict_steps || opts.boolean_marking) && n > 0) {
      ex = net.explore(n, opts.exploration_cap);
      have_ex = true;
    }
    enc.bool_marking = opts.boolean_marking && have_ex && ex.one_bounded;

    std::set<size_t> base;
    if (enc.bool_marking) {
      // Complete exploration; its last cumulative level is exactly the set
      // of transitions that can ever fire, and in a 1-bounded net none of
      // them carries an arc weight above 1.
      base = ex.fireable.back();
    } else {
      for (size_t t = 0; t < T.size(); ++t) base.insert(t);
    }
    enc.step_domain.resize(n);
    for (size_t i = 1; i <= n; ++i) {
      if (opts.restrict_steps && have_ex && !ex.fireable[i - 1].empty()) {
        enc.step_domain[i - 1] = ex.fireable[i - 1];
        if (enc.bool_marking) {
          std::set<size_t> inter;
          std::set_intersection(ex.fireable[i - 1].begin(),
                                ex.fireable[i - 1].end(), base.begin(),
                                base.end(),
                                std::inserter(inter, inter.begin()));
          enc.step_domain[i - 1] = std::move(inter);
        }
      } else if (opts.restrict_steps && have_ex) {
        enc.step_domain[i - 1] = {};
      } else {
        enc.step_domain[i - 1] = base;
      }
    }

    // Cost of a padded step never exceeds any real step, and the sum below
    // dominates every distance-table cell the optimum can take.
    enc.big_m = 1;
    for (const Event& e : trace.events)
      enc.big_m = cost_add(enc.big_m, pf.log_move(e));
    Cost max_pm = pf.max_model_move(net);
    for (size_t j = 0; j < n; ++j) enc.big_m = cost_add(enc.big_m, max_pm);
    TermRef big_m_const = a.t_int(Int(enc.big_m));

    // Variables. Creation order fixes the declaration order in the script.
    enc.step.resize(n);
    enc.step_name.resize(n);
    for (size_t i = 1; i <= n; ++i) {
      enc.step_name[i - 1] = "S" + std::to_string(i);
      enc.step[i - 1] = a.t_var(enc.step_name[i - 1], SmtSort::Int);
    }
    enc.mark.assign(n + 1, std::vector<TermRef>(P.size()));
    for (size_t i = 0; i <= n; ++i)
      for (size_t p = 0; p < P.size(); ++p)
        enc.mark[i][p] =
            a.t_var("M" + std::to_string(i) + "_p" + std::to_string(p),
                    enc.bool_marking ? SmtSort::Bool : SmtSort::Int);

    if (!V.empty()) {
      enc.data.assign(n + 1, std::vector<TermRef>(V.size()));
      enc.data_name.assign(n + 1, std::vector<std::string>(V.size()));
    }
    for (size_t v = 0; v < V.size(); ++v) {
      enc.data[0][v] = a.t_var("X0_v" + std::to_string(v),
                               smt_sort_for(V[v].sort));
    }
    for (size_t i = 1; i <= n; ++i) {
      for (size_t v = 0; v < V.size(); ++v) {
        bool writable = false;
        if (opts.restrict_steps) {
          for (size_t t : enc.step_domain[i - 1])
            if (T[t].write_set.count(V[v].name)) writable = true;
        } else {
          writable = true;
        }
        enc.data[i][v] =
            writable ? a.t_var("X" + std::to_string(i) + "_v" +
                                   std::to_string(v),
                               smt_sort_for(V[v].sort))
                     : enc.data[i - 1][v];
      }
    }
    for (size_t i = 0; i <= n; ++i)
      for (size_t v = 0; v < V.size(); ++v)
        enc.data_name[i][v] = a.var_name(*a.as_var(enc.data[i][v]));

    enc.delta.assign(m + 1, std::vector<TermRef>(n + 1));
    for (size_t i = 0; i <= m; ++i)
      for (size_t j = 0; j <= n; ++j)
        enc.delta[i][j] = a.t_var(
            "d" + std::to_string(i) + "_" + std::to_string(j), SmtSort::Int);
    enc.objective = enc.delta[m][n];
    enc.delta_name = "d" + std::to_string(m) + "_" + std::to_string(n);

    // init
    for (size_t p = 0; p < P.size(); ++p) {
      uint32_t c = net.initial_marking()[p];
      assert_in("init", a.eq(enc.mark[0][p], enc.bool_marking
                                                 ? a.t_bool(c == 1)
                                                 : a.t_int(Int(c))));
    }
    for (size_t v = 0; v < V.size(); ++v)
      assert_in("init",
                a.eq(enc.data[0][v],
                     value_const(V[v].initial, smt_sort_for(V[v].sort))));

    // final
    for (size_t p = 0; p < P.size(); ++p) {
      uint32_t c = net.final_marking()[p];
      assert_in("final", a.eq(enc.mark[n][p], enc.bool_marking
                                                  ? a.t_bool(c == 1)
                                                  : a.t_int(Int(c))));
    }

    // trans, enabled, mark, data
    for (size_t i = 1; i <= n; ++i) {
      TermRef s = enc.step[i - 1];
      std::vector<TermRef> range{a.eq(s, a.t_int(0))};
      for (size_t t : enc.step_domain[i - 1])
        range.push_back(a.eq(s, a.t_int(Int(t + 1))));
      assert_in("trans", a.or_(std::move(range)));

      for (size_t t : enc.step_domain[i - 1]) {
        TermRef fires = a.eq(s, a.t_int(Int(t + 1)));
        std::vector<TermRef> pre_ok;
        for (const auto& [p, mult] : T[t].pre)
          pre_ok.push_back(enc.bool_marking
                               ? enc.mark[i - 1][p]
                               : a.ge(enc.mark[i - 1][p], a.t_int(Int(mult))));
        assert_in("enabled", a.implies(fires, a.and_(std::move(pre_ok))));
      }

      for (size_t t : enc.step_domain[i - 1]) {
        TermRef fires = a.eq(s, a.t_int(Int(t + 1)));
        std::map<size_t, int64_t> flow;
        for (const auto& [p, mult] : T[t].pre) flow[p] -= mult;
        for (const auto& [p, mult] : T[t].post) flow[p] += mult;
        std::vector<TermRef> cells;
        for (size_t p = 0; p < P.size(); ++p) {
          auto it = flow.find(p);
          if (enc.bool_marking) {
            bool produced = false, consumed = false;
            for (const auto& [pp, mult] : T[t].post)
              if (pp == p && mult > 0) produced = true;
            for (const auto& [pp, mult] : T[t].pre)
              if (pp == p && mult > 0) consumed = true;
            TermRef rhs = produced  ? a.t_bool(true)
                          : consumed ? a.t_bool(false)
                                     : enc.mark[i - 1][p];
            cells.push_back(a.eq(enc.mark[i][p], rhs));
          } else {
            TermRef rhs = enc.mark[i - 1][p];
            if (it != flow.end() && it->second != 0)
              rhs = a.add2(rhs, a.t_int(Int(it->second)));
            cells.push_back(a.eq(enc.mark[i][p], rhs));
          }
        }
        assert_in("mark", a.implies(fires, a.and_(std::move(cells))));
      }
      {
        TermRef pads = a.eq(s, a.t_int(0));
        std::vector<TermRef> cells;
        for (size_t p = 0; p < P.size(); ++p)
          cells.push_back(a.eq(enc.mark[i][p], enc.mark[i - 1][p]));
        assert_in("mark", a.implies(pads, a.and_(std::move(cells))));
      }

      if (!V.empty()) {
        for (size_t t : enc.step_domain[i - 1]) {
          TermRef fires = a.eq(s, a.t_int(Int(t + 1)));
          std::vector<TermRef> body{chi(T[t].guard.root(), i)};
          for (size_t v = 0; v < V.size(); ++v) {
            if (T[t].write_set.count(V[v].name)) continue;
            if (enc.data[i][v] == enc.data[i - 1][v]) continue;
            body.push_back(a.eq(enc.data[i][v], enc.data[i - 1][v]));
          }
          assert_in("data", a.implies(fires, a.and_(std::move(body))));
        }
        TermRef pads = a.eq(s, a.t_int(0));
        std::vector<TermRef> body;
        for (size_t v = 0; v < V.size(); ++v) {
          if (enc.data[i][v] == enc.data[i - 1][v]) continue;
          body.push_back(a.eq(enc.data[i][v], enc.data[i - 1][v]));
        }
        assert_in("data", a.implies(pads, a.and_(std::move(body))));
      }
    }

    // Model-move penalty of step j as a term over S_j.
    std::vector<TermRef> pm(n + 1);
    for (size_t j = 1; j <= n; ++j) {
      TermRef s = enc.step[j - 1];
      // Nested from the back: last domain transition is the default branch.
      const auto& dom = enc.step_domain[j - 1];
      if (dom.empty()) {
        pm[j] = a.t_int(0); // step is forced to pad
        continue;
      }
      std::vector<size_t> ts(dom.begin(), dom.end());
      TermRef term = a.t_int(Int(pf.model_move(net, {ts.back(), {}})));
      for (size_t k = ts.size() - 1; k-- > 0;) {
        term = a.ite(a.eq(s, a.t_int(Int(ts[k] + 1))),
                     a.t_int(Int(pf.model_move(net, {ts[k], {}}))), term);
      }
      pm[j] = a.ite(a.eq(s, a.t_int(0)), a.t_int(0), term);
    }

    // Synchronous-move penalty for event i against step j.
    auto peq = [&](size_t i, size_t j) -> TermRef {
      const Event& e = trace.events[i - 1];
      auto t_opt = net.transition_by_label(e.activity);
      if (!t_opt || !enc.step_domain[j - 1].count(*t_opt)) return big_m_const;
      size_t t = *t_opt;
      TermRef matches = a.eq(enc.step[j - 1], a.t_int(Int(t + 1)));
      if (pf.kind() == ProfileKind::Levenshtein)
        return a.ite(matches, a.t_int(0), big_m_const);
      std::vector<TermRef> mismatches;
      for (const auto& vname : T[t].write_set) {
        auto pit = e.payload.find(vname);
        if (pit == e.payload.end()) continue;
        size_t v = *net.variable_index(vname);
        TermRef c = value_const(pit->second, smt_sort_for(V[v].sort));
        mismatches.push_back(
            a.ite(a.eq(enc.data[j][v], c), a.t_int(0), a.t_int(1)));
      }
      TermRef sum = mismatches.empty() ? a.t_int(0) : a.add(std::move(mismatches));
      return a.ite(matches, sum, big_m_const);
    };

    // delta
    auto define = [&](TermRef cell, std::vector<TermRef> lower_bounds,
                      TermRef exact) {
      if (opts.relax_distance) {
        std::vector<TermRef> disj;
        for (TermRef b : lower_bounds) disj.push_back(a.ge(cell, b));
        assert_in("delta", a.or_(std::move(disj)));
      } else {
        assert_in("delta", a.eq(cell, exact));
      }
    };
    define(enc.delta[0][0], {a.t_int(0)}, a.t_int(0));
    for (size_t i = 1; i <= m; ++i) {
      TermRef rhs = a.add2(enc.delta[i - 1][0],
                           a.t_int(Int(pf.log_move(trace.events[i - 1]))));
      define(enc.delta[i][0], {rhs}, rhs);
    }
    for (size_t j = 1; j <= n; ++j) {
      TermRef rhs = a.add2(enc.delta[0][j - 1], pm[j]);
      define(enc.delta[0][j], {rhs}, rhs);
    }
    for (size_t i = 1; i <= m; ++i) {
      for (size_t j = 1; j <= n; ++j) {
        TermRef viaLog = a.add2(enc.delta[i - 1][j],
                                a.t_int(Int(pf.log_move(trace.events[i - 1]))));
        TermRef viaModel = a.add2(enc.delta[i][j - 1], pm[j]);
        TermRef viaSync = a.add2(enc.delta[i - 1][j - 1], peq(i, j));
        TermRef min3 = a.ite(
            a.and_({a.le(viaLog, viaModel), a.le(viaLog, viaSync)}), viaLog,
            a.ite(a.le(viaModel, viaSync), viaModel, viaSync));
        define(enc.delta[i][j], {viaLog, viaModel, viaSync}, min3);
      }
    }

    enc.uses_reals = a.uses_reals();

    if (opts.name_subterms) {
      std::vector<TermRef> roots;
      roots.reserve(enc.assertions.size());
      for (const auto& [g, r] : enc.assertions) roots.push_back(r);
      enc.shared_names = a.name_shared_subterms(roots);
    }
  }
};

}  // namespace

Encoding encode(const DPN& net, const LogTrace& trace,
                const PenaltyProfile& profile, const EncodeOptions& opts) {
  Encoding enc;
  enc.m = trace.events.size();
  enc.n = opts.bound_override
              ? *opts.bound_override
              : compute_bound(net, enc.m, opts.exploration_cap);
  Builder b(net, trace, profile, opts, enc);
  b.build();
  return enc;
}

void Encoding::print_script(std::ostream& os) const {
  os << "(set-logic " << (uses_reals ? "QF_LIRA" : "QF_LIA") << ")\n";
  os << "(set-option :produce-models true)\n";
  for (size_t v = 0; v < arena.var_count(); ++v)
    os << "(declare-fun " << arena.var_name(v) << " () "
       << smt_sort_name(arena.var_sort(v)) << ")\n";
  const auto& names = shared_names;
  std::vector<TermRef> ordered;
  ordered.reserve(names.size());
  for (const auto& [r, nm] : names) ordered.push_back(r);
  std::sort(ordered.begin(), ordered.end());
  for (TermRef r : ordered) {
    os << "(declare-fun " << names.at(r) << " () "
       << smt_sort_name(arena.sort_of(r)) << ")\n";
    os << "(assert (= " << names.at(r) << " ";
    arena.print_def(os, r, &names);
    os << "))\n";
  }
  for (const auto& [group, r] : assertions) {
    os << "(assert ";
    arena.print(os, r, &names);
    os << ") ; " << group << "\n";
  }
}

std::string Encoding::script() const {
  std::ostringstream os;
  print_script(os);
  return os.str();
}

}  // namespace dpncheck
