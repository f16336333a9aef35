#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "dpncheck/guard.hpp"

using namespace dpncheck;
using guard_ast::CmpOp;

namespace {

std::map<std::string, Sort> xy_sorts() {
  return {{"x", Sort::Int}, {"y", Sort::Int}};
}

Assignment assign(std::initializer_list<std::pair<AnnVar, Value>> entries) {
  Assignment beta;
  for (const auto& [var, value] : entries) beta.emplace(var, value);
  return beta;
}

AnnVar rd(const std::string& name) { return AnnVar{name, false}; }
AnnVar wr(const std::string& name) { return AnnVar{name, true}; }

}  // namespace

TEST_CASE("write guard holds for a non-negative written value") {
  StringPool pool;
  Guard g = Guard::parse("x' >= 0", xy_sorts(), pool);
  CHECK(g.eval(assign({{wr("x"), Value::integer(2)}})));
  CHECK_FALSE(g.eval(assign({{wr("x"), Value::integer(-1)}})));
  CHECK(g.write_vars() == std::set<std::string>{"x"});
  CHECK(g.read_vars().empty());
}

TEST_CASE("increment guard relates read and written copies") {
  StringPool pool;
  Guard g = Guard::parse("y' == y + 1", xy_sorts(), pool);
  CHECK(g.eval(
      assign({{rd("y"), Value::integer(0)}, {wr("y"), Value::integer(1)}})));
  CHECK_FALSE(g.eval(
      assign({{rd("y"), Value::integer(0)}, {wr("y"), Value::integer(3)}})));
  CHECK(g.read_vars() == std::set<std::string>{"y"});
  CHECK(g.write_vars() == std::set<std::string>{"y"});
}

TEST_CASE("conjunction fails when one side fails") {
  StringPool pool;
  Guard g = Guard::parse("x <= 3 && y < 4", xy_sorts(), pool);
  CHECK_FALSE(g.eval(
      assign({{rd("x"), Value::integer(4)}, {rd("y"), Value::integer(1)}})));
  CHECK(g.eval(
      assign({{rd("x"), Value::integer(2)}, {rd("y"), Value::integer(1)}})));
}

TEST_CASE("missing assignment entries are named in the error") {
  StringPool pool;
  Guard g = Guard::parse("x <= 3 && y < 4", xy_sorts(), pool);
  CHECK_THROWS_WITH_AS(g.eval(assign({{rd("x"), Value::integer(1)}})),
                       doctest::Contains("y"), GuardError);
}

TEST_CASE("operator precedence: not, comparison, and, or") {
  StringPool pool;
  std::map<std::string, Sort> sorts{{"x", Sort::Int}, {"p", Sort::Bool}};
  Guard g = Guard::parse("!p && x > 1 || x == 0", sorts, pool);
  // Parses as ((!p && x > 1) || x == 0).
  CHECK(g.eval(assign(
      {{rd("p"), Value::boolean(false)}, {rd("x"), Value::integer(2)}})));
  CHECK(g.eval(assign(
      {{rd("p"), Value::boolean(true)}, {rd("x"), Value::integer(0)}})));
  CHECK_FALSE(g.eval(assign(
      {{rd("p"), Value::boolean(true)}, {rd("x"), Value::integer(2)}})));
}

TEST_CASE("string equality guards intern their literals") {
  StringPool pool;
  std::map<std::string, Sort> sorts{{"kind", Sort::String}};
  Guard g = Guard::parse("kind' == \"gold\"", sorts, pool);
  int64_t gold = pool.intern("gold");
  int64_t iron = pool.intern("iron");
  CHECK(g.eval(assign({{wr("kind"), Value::string(gold)}})));
  CHECK_FALSE(g.eval(assign({{wr("kind"), Value::string(iron)}})));
}

TEST_CASE("rational constants and mixed arithmetic evaluate exactly") {
  StringPool pool;
  std::map<std::string, Sort> sorts{{"r", Sort::Rat}};
  Guard g = Guard::parse("r' > 0.1", sorts, pool);
  CHECK(g.eval(assign({{wr("r"), Value::rational(Rat(11, 100))}})));
  CHECK_FALSE(g.eval(assign({{wr("r"), Value::rational(Rat(1, 10))}})));
  Guard h = Guard::parse("r + 1 <= 2", sorts, pool);
  CHECK(h.eval(assign({{rd("r"), Value::rational(Rat(1))}})));
  CHECK_FALSE(h.eval(assign({{rd("r"), Value::rational(Rat(3, 2))}})));

  // Fraction literals carry values no decimal can spell.
  Guard f = Guard::parse("r >= 1/3", sorts, pool);
  CHECK(f.eval(assign({{rd("r"), Value::rational(Rat(1, 3))}})));
  CHECK_FALSE(f.eval(assign({{rd("r"), Value::rational(Rat(33, 100))}})));
  CHECK_THROWS_WITH_AS(Guard::parse("r > 1/0", sorts, pool),
                       doctest::Contains("zero denominator"), GuardError);
}

TEST_CASE("parse errors carry position information") {
  StringPool pool;
  CHECK_THROWS_AS(Guard::parse("x >=", xy_sorts(), pool), GuardError);
  CHECK_THROWS_AS(Guard::parse("z > 0", xy_sorts(), pool), GuardError);
  CHECK_THROWS_AS(Guard::parse("x && y", xy_sorts(), pool), GuardError);
  CHECK_THROWS_WITH_AS(Guard::parse("x > (", xy_sorts(), pool),
                       doctest::Contains("offset"), GuardError);
}

TEST_CASE("canonical text is a parse fixpoint") {
  StringPool pool;
  std::map<std::string, Sort> sorts{
      {"x", Sort::Int}, {"y", Sort::Int}, {"p", Sort::Bool}};
  std::map<std::string, Sort> rsorts{{"r", Sort::Rat}};
  Guard q = Guard::parse("r > 0.5", rsorts, pool);
  CHECK(q.text(&pool) == "r > 1/2"); // constants print as exact fractions
  CHECK(Guard::parse(q.text(&pool), rsorts, pool).text(&pool) == "r > 1/2");

  for (const char* text :
       {"x' >= 0", "y' == y + 1", "x <= 3 && y < 4", "!(p || x > 2)",
        "x - 1 > -y", "x == 0 || !(y >= 2) && p", "true", "false"}) {
    Guard g = Guard::parse(text, sorts, pool);
    std::string once = g.text(&pool);
    Guard h = Guard::parse(once, sorts, pool);
    CHECK(h.text(&pool) == once);
  }
}

TEST_CASE("trivially true guard") {
  Guard g;
  CHECK(g.is_true());
  CHECK(g.eval({}));
  CHECK(g.read_vars().empty());
  CHECK(g.write_vars().empty());
}

TEST_CASE("guard conjunction flattens trivially true sides") {
  StringPool pool;
  Guard t;
  Guard g = Guard::parse("x > 0", xy_sorts(), pool);
  CHECK(guard_and(t, g).text(&pool) == g.text(&pool));
  CHECK(guard_and(g, t).text(&pool) == g.text(&pool));
  Guard both = guard_and(g, Guard::parse("y > 0", xy_sorts(), pool));
  CHECK(both.eval(
      assign({{rd("x"), Value::integer(1)}, {rd("y"), Value::integer(1)}})));
  CHECK_FALSE(both.eval(
      assign({{rd("x"), Value::integer(1)}, {rd("y"), Value::integer(0)}})));
}

TEST_CASE("atom visitor reports negation parity") {
  StringPool pool;
  Guard g = Guard::parse("!(x > 1 || !(y == 2))", xy_sorts(), pool);
  size_t atoms = 0, negated = 0;
  g.visit_atoms([&](const guard_ast::Form& f, bool neg) {
    ++atoms;
    if (neg) ++negated;
    CHECK(f.kind == guard_ast::FormKind::Cmp);
  });
  CHECK(atoms == 2);
  CHECK(negated == 1); // x > 1 under one not; y == 2 under two
}

TEST_CASE("comparison helpers flip and negate correctly") {
  using guard_ast::flip_cmp;
  using guard_ast::negate_cmp;
  CHECK(flip_cmp(CmpOp::Lt) == CmpOp::Gt);
  CHECK(flip_cmp(CmpOp::Le) == CmpOp::Ge);
  CHECK(flip_cmp(CmpOp::Eq) == CmpOp::Eq);
  CHECK(flip_cmp(CmpOp::Ne) == CmpOp::Ne);
  CHECK(negate_cmp(CmpOp::Lt) == CmpOp::Ge);
  CHECK(negate_cmp(CmpOp::Eq) == CmpOp::Ne);
  CHECK(negate_cmp(CmpOp::Gt) == CmpOp::Le);
}

TEST_CASE("sort errors are rejected at parse time") {
  StringPool pool;
  std::map<std::string, Sort> sorts{{"p", Sort::Bool}, {"x", Sort::Int}};
  CHECK_THROWS_AS(Guard::parse("p > 1", sorts, pool), GuardError);
  CHECK_THROWS_AS(Guard::parse("x == \"s\"", sorts, pool), GuardError);
  CHECK_THROWS_AS(Guard::parse("x + p > 0", sorts, pool), GuardError);
}
