#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "dpncheck/smt.hpp"

using namespace dpncheck;

TEST_CASE("structurally equal terms share one node") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  TermRef five1 = a.t_int(5);
  TermRef five2 = a.t_int(Int(5));
  CHECK(five1 == five2);
  TermRef s1 = a.add2(x, five1);
  TermRef s2 = a.add2(x, five2);
  CHECK(s1 == s2);
  CHECK(a.t_var("x", SmtSort::Int) == x);
  CHECK_THROWS_AS(a.t_var("x", SmtSort::Bool), std::logic_error);
}

TEST_CASE("numeric sorts unify toward reals") {
  TermArena a;
  TermRef i = a.t_var("i", SmtSort::Int);
  TermRef r = a.t_var("r", SmtSort::Real);
  CHECK(a.sort_of(a.add2(i, a.t_int(1))) == SmtSort::Int);
  CHECK(a.sort_of(a.add2(i, r)) == SmtSort::Real);
  CHECK(a.sort_of(a.le(i, r)) == SmtSort::Bool);
  CHECK(a.uses_reals());

  TermArena pure;
  TermRef j = pure.t_var("j", SmtSort::Int);
  pure.ge(j, pure.t_int(0));
  CHECK_FALSE(pure.uses_reals());
}

TEST_CASE("evaluation computes exact values") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  TermRef y = a.t_var("y", SmtSort::Int);
  TermRef sum = a.add({x, y, a.t_int(3)});
  TermRef cond = a.gt(sum, a.t_int(10));
  TermRef pick = a.ite(cond, x, y);

  std::vector<std::optional<Value>> env(a.var_count());
  env[*a.as_var(x)] = Value::integer(6);
  env[*a.as_var(y)] = Value::integer(2);
  CHECK(a.eval(sum, env) == Value::integer(11));
  CHECK(a.eval(cond, env) == Value::boolean(true));
  CHECK(a.eval(pick, env) == Value::integer(6));

  env[*a.as_var(y)] = std::nullopt;
  CHECK_THROWS_AS(a.eval(pick, env), std::logic_error);
}

TEST_CASE("boolean operators evaluate and simplify") {
  TermArena a;
  TermRef p = a.t_var("p", SmtSort::Bool);
  std::vector<std::optional<Value>> env(1);
  env[0] = Value::boolean(true);
  CHECK(a.eval(a.and_({p, a.t_bool(true)}), env) == Value::boolean(true));
  CHECK(a.eval(a.or_({a.not_(p), a.t_bool(false)}), env) ==
        Value::boolean(false));
  CHECK(a.eval(a.implies(p, a.t_bool(false)), env) == Value::boolean(false));
  CHECK(a.eval(a.eq(p, p), env) == Value::boolean(true));
}

TEST_CASE("subtraction and negation mix ints and rationals") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  TermRef half = a.t_rat(Rat(1, 2));
  TermRef d = a.sub(x, half);
  std::vector<std::optional<Value>> env(1);
  env[0] = Value::integer(2);
  CHECK(a.eval(d, env) == Value::rational(Rat(3, 2)));
  CHECK(a.eval(a.neg(x), env) == Value::integer(-2));
}

TEST_CASE("rendering follows the solver syntax") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  CHECK(a.to_string(a.add2(x, a.t_int(3))) == "(+ x 3)");
  CHECK(a.to_string(a.t_int(-3)) == "(- 3)");
  CHECK(a.to_string(a.le(x, a.t_int(0))) == "(<= x 0)");
  CHECK(a.to_string(a.not_(a.eq(x, a.t_int(1)))) == "(not (= x 1))");
  CHECK(a.to_string(a.t_rat(Rat(1, 2))) == "(/ 1.0 2.0)");
  CHECK(a.to_string(a.t_rat(Rat(2))) == "2.0");
  CHECK(a.to_string(a.t_bool(true)) == "true");
}

TEST_CASE("shared subterms get names and print through them") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  TermRef y = a.t_var("y", SmtSort::Int);
  // Big enough that a name pays for its declaration.
  TermRef shared = a.add({x, y, a.t_int(10), a.t_int(11), a.t_int(12),
                          a.t_int(13), a.t_int(14)});
  TermRef top =
      a.and_({a.gt(shared, a.t_int(0)), a.lt(shared, a.t_int(9))});

  auto names = a.name_shared_subterms({top});
  REQUIRE(names.count(shared) == 1);
  std::string with = a.to_string(top, &names);
  CHECK(with.find(names.at(shared)) != std::string::npos);
  // The definition body itself still expands the node.
  std::ostringstream def;
  a.print_def(def, shared, &names);
  CHECK(def.str() == "(+ x y 10 11 12 13 14)");
  // Leaves are never named.
  CHECK(names.count(x) == 0);

  // A shared node too small to pay for a declaration stays inline.
  TermRef small = a.add2(x, y);
  TermRef top2 =
      a.and_({a.gt(small, a.t_int(0)), a.lt(small, a.t_int(9))});
  CHECK(a.name_shared_subterms({top2}).count(small) == 0);
}

TEST_CASE("variable bookkeeping") {
  TermArena a;
  TermRef x = a.t_var("x", SmtSort::Int);
  TermRef p = a.t_var("p", SmtSort::Bool);
  CHECK(a.var_count() == 2);
  CHECK(a.var_name(*a.as_var(x)) == "x");
  CHECK(a.var_sort(*a.as_var(p)) == SmtSort::Bool);
  CHECK_FALSE(a.as_var(a.t_int(1)).has_value());

  std::vector<bool> seen;
  a.collect_vars(a.add2(x, a.t_int(1)), seen);
  REQUIRE(seen.size() == 2);
  CHECK(seen[*a.as_var(x)]);
  CHECK_FALSE(seen[*a.as_var(p)]);
}
