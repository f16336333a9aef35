#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dpncheck/value.hpp"

using namespace dpncheck;

TEST_CASE("sort names round-trip") {
  for (Sort s : {Sort::Bool, Sort::Int, Sort::Rat, Sort::String}) {
    auto back = sort_from_name(sort_name(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK_FALSE(sort_from_name("float").has_value());
  CHECK_FALSE(sort_from_name("").has_value());
}

TEST_CASE("string pool interns to dense stable codes") {
  StringPool pool;
  int64_t a = pool.intern("alpha");
  int64_t b = pool.intern("beta");
  CHECK(a != b);
  CHECK(pool.intern("alpha") == a);
  CHECK(pool.spell(a) == "alpha");
  CHECK(pool.spell(b) == "beta");
  CHECK(pool.size() == 2);
  CHECK_THROWS_AS(pool.spell(99), std::out_of_range);
}

TEST_CASE("value accessors enforce sorts") {
  Value i = Value::integer(7);
  CHECK(i.sort() == Sort::Int);
  CHECK(i.as_int() == 7);
  CHECK_THROWS(i.as_bool());

  Value r = Value::rational(Rat(3, 4));
  CHECK(r.as_rat() == Rat(3, 4));
  CHECK(r.widen() == Rat(3, 4));
  CHECK(i.widen() == Rat(7));

  Value s = Value::string(2);
  CHECK(s.as_string() == 2);
  CHECK_THROWS(s.widen());
}

TEST_CASE("equality is exact, numeric across int and rat") {
  CHECK(Value::integer(3) == Value::integer(3));
  CHECK(Value::integer(3) != Value::integer(4));
  CHECK(Value::integer(2) == Value::rational(Rat(2)));
  CHECK(Value::integer(2) != Value::rational(Rat(2, 3)));
  CHECK(Value::boolean(true) != Value::integer(1));
  CHECK(Value::string(0) != Value::string(1));
  CHECK(Value::string(1) == Value::string(1));
}

TEST_CASE("keys distinguish sorts even when values compare equal") {
  CHECK(Value::integer(1).key() == "i:1");
  CHECK(Value::rational(Rat(1)).key() == "r:1");
  CHECK(Value::integer(1).key() != Value::rational(Rat(1)).key());
  CHECK(Value::boolean(true).key() == "b:1");
  CHECK(Value::string(5).key() == "s:5");
}

TEST_CASE("display renders strings via the pool") {
  StringPool pool;
  int64_t code = pool.intern("hello");
  CHECK(Value::string(code).display(&pool) == "\"hello\"");
  CHECK(Value::integer(-3).display() == "-3");
  CHECK(Value::rational(Rat(1, 2)).display() == "1/2");
  CHECK(Value::boolean(false).display() == "false");
}

TEST_CASE("defaults are zero, false, and the empty string") {
  StringPool pool;
  CHECK(default_value(Sort::Int, pool) == Value::integer(0));
  CHECK(default_value(Sort::Rat, pool) == Value::rational(Rat(0)));
  CHECK(default_value(Sort::Bool, pool) == Value::boolean(false));
  Value s = default_value(Sort::String, pool);
  CHECK(pool.spell(s.as_string()) == "");
}

TEST_CASE("decimal literals convert exactly") {
  CHECK(decimal_to_rational("0.1") == Rat(1, 10));
  CHECK(decimal_to_rational("-12.375") == Rat(-99, 8));
  CHECK(decimal_to_rational("3e-2") == Rat(3, 100));
  CHECK(decimal_to_rational("2.5E3") == Rat(2500));
  CHECK(decimal_to_rational("42") == Rat(42));
  CHECK(decimal_to_rational("+0.0") == Rat(0));
  CHECK_THROWS_AS(decimal_to_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(decimal_to_rational("nan"), std::invalid_argument);
  CHECK_THROWS_AS(decimal_to_rational("inf"), std::invalid_argument);
  CHECK_THROWS_AS(decimal_to_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(decimal_to_rational("1.2.3"), std::invalid_argument);
}

TEST_CASE("integer parsing and rational rendering") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int("-7") == -7);
  CHECK(rat_to_string(Rat(1, 2)) == "1/2");
  CHECK(rat_to_string(Rat(4, 2)) == "2");
  CHECK(rat_to_string(Rat(-6, 4)) == "-3/2");
  CHECK(rat_to_string(Rat(0)) == "0");
}
