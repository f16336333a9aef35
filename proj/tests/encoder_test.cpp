#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

using namespace dpncheck;
using fixtures::ev;

namespace {

EncodeOptions plain() {
  EncodeOptions o;
  o.restrict_steps = false;
  o.boolean_marking = false;
  o.relax_distance = false;
  o.name_subterms = false;
  return o;
}

}  // namespace

TEST_CASE("the default bound is trace length plus control distance") {
  DPN net = fixtures::chain_net();
  CHECK(compute_bound(net, 2) == 5);
  CHECK(compute_bound(net, 0) == 3);
}

TEST_CASE("bound override wins") {
  DPN net = fixtures::chain_net();
  EncodeOptions opts = plain();
  opts.bound_override = 7;
  Encoding enc =
      encode(net, fixtures::fitting_trace(), PenaltyProfile::standard(), opts);
  CHECK(enc.n == 7);
  CHECK(enc.step.size() == 7);
}

TEST_CASE("unreachable final markings are encoding errors") {
  DPNBuilder b;
  b.add_place("p").add_place("q").add_place("r");
  b.add_transition("t", "go", "");
  b.add_arc("p", "t").add_arc("t", "q");
  b.mark_initial("p").mark_final("r");
  DPN net = b.finish();
  CHECK_THROWS_AS(compute_bound(net, 1), EncodeError);
  CHECK_THROWS_AS(
      encode(net, LogTrace{}, PenaltyProfile::standard(), plain()),
      EncodeError);
}

TEST_CASE("assertion groups have the predicted sizes") {
  DPN net = fixtures::chain_net(); // |P| = 4, |T| = 4, |V| = 2
  LogTrace e = fixtures::fitting_trace(); // m = 2
  Encoding enc = encode(net, e, PenaltyProfile::standard(), plain());
  REQUIRE(enc.m == 2);
  REQUIRE(enc.n == 5);
  CHECK(enc.group_counts.at("init") == 4 + 2);
  CHECK(enc.group_counts.at("final") == 4);
  CHECK(enc.group_counts.at("trans") == 5);
  CHECK(enc.group_counts.at("enabled") == 5 * 4);
  CHECK(enc.group_counts.at("mark") == 5 * (4 + 1));
  CHECK(enc.group_counts.at("data") == 5 * (4 + 1));
  CHECK(enc.group_counts.at("delta") == 3 * 6);

  size_t total = 0;
  for (const auto& [group, count] : enc.group_counts) total += count;
  CHECK(enc.assertions.size() == total);
}

TEST_CASE("a data-free net has no data group") {
  DPNBuilder b;
  b.add_place("p").add_place("q");
  b.add_transition("t", "go", "");
  b.add_arc("p", "t").add_arc("t", "q");
  b.mark_initial("p").mark_final("q");
  DPN net = b.finish();
  Encoding enc = encode(net, LogTrace{}, PenaltyProfile::standard(), plain());
  CHECK(enc.group_counts.count("data") == 0);
  CHECK(enc.group_counts.at("init") == 2);
  CHECK(enc.data_name.empty());
}

TEST_CASE("step restriction shrinks the per-step transition domains") {
  DPN net = fixtures::chain_net();
  LogTrace e = fixtures::fitting_trace();
  EncodeOptions restricted = plain();
  restricted.restrict_steps = true;
  Encoding enc = encode(net, e, PenaltyProfile::standard(), restricted);
  REQUIRE(enc.step_domain.size() == 5);
  // Only the first chain transition can fire in step 1.
  CHECK(enc.step_domain[0] ==
        std::set<size_t>{*net.transition_index("t_a")});
  CHECK(enc.step_domain[4].size() == 4);
  // Fewer enabledness and frame implications than the unrestricted count.
  CHECK(enc.group_counts.at("enabled") < 5 * 4);
  CHECK(enc.group_counts.at("data") < 5 * (4 + 1));

  Encoding full = encode(net, e, PenaltyProfile::standard(), plain());
  for (const auto& dom : full.step_domain) CHECK(dom.size() == 4);
}

TEST_CASE("boolean markings engage only on one-bounded nets") {
  DPN net = fixtures::chain_net();
  EncodeOptions opts = plain();
  opts.boolean_marking = true;
  Encoding enc =
      encode(net, fixtures::fitting_trace(), PenaltyProfile::standard(), opts);
  CHECK(enc.bool_marking);
  CHECK(enc.arena.sort_of(enc.mark[0][0]) == SmtSort::Bool);

  // Two tokens on one place: the exploration sees past one-boundedness.
  DPNBuilder b;
  b.add_place("p").add_place("q");
  b.add_transition("t", "go", "");
  b.add_arc("p", "t", 2).add_arc("t", "q");
  b.mark_initial("p", 2).mark_final("q");
  Encoding wide =
      encode(b.finish(), LogTrace{}, PenaltyProfile::standard(), opts);
  CHECK_FALSE(wide.bool_marking);
  CHECK(wide.arena.sort_of(wide.mark[0][0]) == SmtSort::Int);
}

TEST_CASE("the infinity surrogate exceeds any attainable cost") {
  DPN net = fixtures::chain_net();
  LogTrace e = fixtures::fitting_trace();
  Encoding enc = encode(net, e, PenaltyProfile::standard(), plain());
  // One past: every log move (2) plus bound many heaviest model moves (5*2).
  CHECK(enc.big_m == 1 + 2 + 5 * 2);
}

TEST_CASE("decoding names line up with the script") {
  DPN net = fixtures::chain_net();
  LogTrace e = fixtures::fitting_trace();
  Encoding enc = encode(net, e, PenaltyProfile::standard(), plain());
  REQUIRE(enc.step_name.size() == 5);
  REQUIRE(enc.data_name.size() == 6);
  REQUIRE(enc.data_name[0].size() == 2);
  CHECK_FALSE(enc.delta_name.empty());
  std::string script = enc.script();
  CHECK(script.find("(set-logic QF_LIA)") != std::string::npos);
  CHECK(script.find(enc.step_name[0]) != std::string::npos);
  CHECK(script.find(enc.delta_name) != std::string::npos);
  CHECK(script.find("(check-sat)") == std::string::npos);
}

TEST_CASE("rational variables switch the logic to mixed arithmetic") {
  DPNBuilder b;
  b.add_variable("r", Sort::Rat);
  b.add_place("p").add_place("q");
  b.add_transition("t", "go", "r' > 0.5");
  b.add_arc("p", "t").add_arc("t", "q");
  b.mark_initial("p").mark_final("q");
  DPN net = b.finish();
  Encoding enc = encode(net, LogTrace{}, PenaltyProfile::standard(), plain());
  CHECK(enc.uses_reals);
  CHECK(enc.script().find("(set-logic QF_LIRA)") != std::string::npos);
}

TEST_CASE("subterm naming introduces definitions without changing counts") {
  DPN net = fixtures::chain_net();
  LogTrace e = fixtures::fitting_trace();
  EncodeOptions named = plain();
  named.name_subterms = true;
  Encoding enc = encode(net, e, PenaltyProfile::standard(), named);
  Encoding bare = encode(net, e, PenaltyProfile::standard(), plain());
  CHECK(enc.group_counts == bare.group_counts);
  CHECK_FALSE(enc.shared_names.empty());
  CHECK(bare.shared_names.empty());
  // Each name arrives as a declaration plus a defining equality.
  CHECK(enc.script().find("(declare-fun |.aux") != std::string::npos);
  CHECK(enc.script().find("(assert (= |.aux") != std::string::npos);
  // Named scripts are the whole point: they must come out smaller.
  CHECK(enc.script().size() < bare.script().size());
}

TEST_CASE("relaxed distance cells become one-sided bounds") {
  DPN net = fixtures::chain_net();
  LogTrace e = fixtures::fitting_trace();
  EncodeOptions relaxed = plain();
  relaxed.relax_distance = true;
  Encoding r = encode(net, e, PenaltyProfile::standard(), relaxed);
  Encoding x = encode(net, e, PenaltyProfile::standard(), plain());
  // Same number of delta assertions, different shape.
  CHECK(r.group_counts.at("delta") == x.group_counts.at("delta"));
  CHECK(r.script() != x.script());
}

TEST_CASE("zero-length encoding on a net already at its final marking") {
  DPNBuilder b;
  b.add_place("p");
  b.add_transition("t", "go", "");
  b.add_arc("p", "t").add_arc("t", "p");
  b.mark_initial("p").mark_final("p");
  DPN net = b.finish();
  Encoding enc = encode(net, LogTrace{}, PenaltyProfile::standard(), plain());
  CHECK(enc.n == 0);
  CHECK(enc.m == 0);
  CHECK(enc.group_counts.at("delta") == 1);
  CHECK(enc.group_counts.count("trans") == 0);
}
