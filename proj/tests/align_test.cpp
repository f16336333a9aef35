#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "dpncheck/align.hpp"
#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"
#include "helpers.hpp"

using namespace dpncheck;
using fixtures::chain_net;
using fixtures::deviating_trace;
using fixtures::ev;
using fixtures::Cnf;
using fixtures::fitting_trace;

namespace {

const std::string& transition_id(const DPN& net, const Move& mv) {
  return net.transitions()[mv.firing.transition].id;
}

const Value& written(const Move& mv, const std::string& var) {
  return mv.firing.beta.at(AnnVar{var, true});
}

Cnf unsat_cnf() {
  Cnf cnf;
  for (int bits = 0; bits < 8; ++bits)
    cnf.clauses.push_back({{{0, (bits & 1) != 0},
                            {1, (bits & 2) != 0},
                            {2, (bits & 4) != 0}}});
  return cnf;
}

Cnf sat_cnf() {
  Cnf cnf;
  cnf.clauses.push_back({{{0, false}, {1, true}, {2, false}}});
  return cnf;
}

}  // namespace

TEST_CASE("a fitting trace aligns at zero cost") {
  DPN net = chain_net();
  ConformanceResult res = conformance(net, fitting_trace(),
                                      PenaltyProfile::standard(),
                                      fixtures::conformance_options());
  REQUIRE(res.status == CheckStatus::Sat);
  CHECK(res.optimal);
  REQUIRE(res.cost.has_value());
  CHECK(*res.cost == 0);
  CHECK(res.trace_id == "t-fit");
  // Trace length 2 plus the three-step shortest path to the final marking.
  CHECK(res.bound == 5);
  CHECK(res.checks >= 1);

  REQUIRE(res.alignment.size() == 3);
  CHECK(res.alignment[0].kind == MoveKind::Sync);
  CHECK(transition_id(net, res.alignment[0]) == "t_a");
  CHECK(res.alignment[0].event == 0);
  CHECK(written(res.alignment[0], "x") == Value::integer(Int(2)));
  CHECK(res.alignment[1].kind == MoveKind::Sync);
  CHECK(transition_id(net, res.alignment[1]) == "t_b");
  CHECK(written(res.alignment[1], "y") == Value::integer(Int(1)));
  CHECK(res.alignment[2].kind == MoveKind::Model);
  CHECK(transition_id(net, res.alignment[2]) == "t_tau");

  // The reported run is the model projection and replays to the end.
  REQUIRE(res.run.size() == 3);
  auto replay = net.replay_run(res.run);
  CHECK(replay.ok);
  CHECK(replay.reached_final);
}

TEST_CASE("one bad write costs a single mismatch") {
  DPN net = chain_net();
  LogTrace trace = deviating_trace();
  ConformanceResult res = conformance(net, trace, PenaltyProfile::standard(),
                                      fixtures::conformance_options());
  REQUIRE(res.status == CheckStatus::Sat);
  CHECK(res.optimal);
  REQUIRE(res.cost.has_value());
  CHECK(*res.cost == 1);
  CHECK(check_alignment(net, trace, res.alignment) == std::nullopt);

  // The repair keeps both events synchronized and bends the x write under
  // the silent check's ceiling, away from the event's 4.
  REQUIRE(res.alignment.size() == 3);
  CHECK(res.alignment[0].kind == MoveKind::Sync);
  const Value& x = written(res.alignment[0], "x");
  CHECK(x != Value::integer(Int(4)));
  CHECK(x.as_int() <= 3);
  CHECK(res.alignment[1].kind == MoveKind::Sync);
  CHECK(written(res.alignment[1], "y") == Value::integer(Int(1)));
}

TEST_CASE("an empty trace is matched by model moves alone") {
  DPN net = chain_net();
  LogTrace empty{"t-empty", {}};

  ConformanceResult std_res = conformance(net, empty,
                                          PenaltyProfile::standard(),
                                          fixtures::conformance_options());
  REQUIRE(std_res.cost.has_value());
  // Two writing transitions at |write|+1 = 2 each; the silent one is free.
  CHECK(*std_res.cost == 4);
  REQUIRE(std_res.alignment.size() == 3);
  for (const Move& mv : std_res.alignment) CHECK(mv.kind == MoveKind::Model);

  ConformanceResult lev_res = conformance(net, empty,
                                          PenaltyProfile::levenshtein(),
                                          fixtures::conformance_options());
  REQUIRE(lev_res.cost.has_value());
  // Every model move costs 1 under levenshtein, the silent one included.
  CHECK(*lev_res.cost == 3);
}

TEST_CASE("payload mismatches add nothing under levenshtein") {
  DPN net = chain_net();
  // The silent check is a mandatory model move and costs 1 in this profile,
  // so 1 is the floor for any trace; the bad x write adds nothing on top.
  ConformanceResult fit = conformance(net, fitting_trace(),
                                      PenaltyProfile::levenshtein(),
                                      fixtures::conformance_options());
  REQUIRE(fit.cost.has_value());
  CHECK(*fit.cost == 1);

  ConformanceResult dev = conformance(net, deviating_trace(),
                                      PenaltyProfile::levenshtein(),
                                      fixtures::conformance_options());
  REQUIRE(dev.status == CheckStatus::Sat);
  REQUIRE(dev.cost.has_value());
  CHECK(*dev.cost == 1);
  CHECK(dev.optimal);
}

TEST_CASE("guard gadgets align freely exactly when satisfiable") {
  fixtures::ChoiceInstance sat = fixtures::choice_instance(sat_cnf());
  REQUIRE(sat.satisfiable);
  ConformanceResult res = conformance(sat.net, sat.trace,
                                      PenaltyProfile::standard(),
                                      fixtures::conformance_options());
  REQUIRE(res.cost.has_value());
  CHECK(*res.cost == 0);

  fixtures::ChoiceInstance unsat = fixtures::choice_instance(unsat_cnf());
  REQUIRE_FALSE(unsat.satisfiable);
  res = conformance(unsat.net, unsat.trace, PenaltyProfile::standard(),
                    fixtures::conformance_options());
  REQUIRE(res.cost.has_value());
  CHECK(*res.cost == 2);
  // The probe event is orphaned and the unguarded branch carries the token.
  REQUIRE(res.alignment.size() == 2);
  bool saw_log = false, saw_any = false;
  for (const Move& mv : res.alignment) {
    if (mv.kind == MoveKind::Log) saw_log = true;
    if (mv.kind == MoveKind::Model)
      saw_any = transition_id(unsat.net, mv) == "t_any";
  }
  CHECK(saw_log);
  CHECK(saw_any);
}

TEST_CASE("every encoding variant reports the same optimum") {
  DPN net = chain_net();
  LogTrace trace = deviating_trace();
  for (int variant = 0; variant < 4; ++variant) {
    ConformanceOptions opts = fixtures::conformance_options();
    switch (variant) {
      case 0: opts.encode.relax_distance = false; break;
      case 1: opts.encode.boolean_marking = false; break;
      case 2: opts.encode.restrict_steps = false; break;
      case 3: opts.encode.name_subterms = false; break;
    }
    CAPTURE(variant);
    ConformanceResult res = conformance(net, trace,
                                        PenaltyProfile::standard(), opts);
    REQUIRE(res.cost.has_value());
    CHECK(*res.cost == 1);
    CHECK(res.optimal);
    CHECK(check_alignment(net, trace, res.alignment) == std::nullopt);
  }
}

TEST_CASE("a net whose guards block every run is a hard error") {
  DPNBuilder b;
  b.add_variable("x", Sort::Int);
  b.add_place("p0").add_place("p1");
  b.add_transition("t", "a", "x' > 0 && x' < 0");
  b.add_arc("p0", "t").add_arc("t", "p1");
  b.mark_initial("p0").mark_final("p1");
  DPN net = b.finish();
  LogTrace trace{"t-blocked", {ev("a")}};
  CHECK_THROWS_WITH_AS(conformance(net, trace, PenaltyProfile::standard(),
                                   fixtures::conformance_options()),
                       doctest::Contains("no alignment found"), AlignError);
}

TEST_CASE("alignments transfer across payload-equivalent traces") {
  DPN net = chain_net();
  PenaltyProfile pf = PenaltyProfile::standard();
  LogTrace e1{"e1", {ev("a", {{"x", 2}}), ev("b", {{"y", 1}})}};
  LogTrace e2{"e2", {ev("a", {{"x", 3}}), ev("b", {{"y", 1}})}};
  ConformanceResult res = conformance(net, e1, pf,
                                      fixtures::conformance_options());
  REQUIRE(res.cost.has_value());
  REQUIRE(*res.cost == 0);

  SUBCASE("onto itself it reproduces cost and shape") {
    Alignment same = transfer_alignment(net, res.alignment, e1, e1, pf);
    REQUIRE(same.size() == res.alignment.size());
    for (size_t i = 0; i < same.size(); ++i)
      CHECK(same[i].kind == res.alignment[i].kind);
    CHECK(alignment_cost(net, e1, same, pf) == 0);
    CHECK(check_alignment(net, e1, same) == std::nullopt);
  }

  SUBCASE("onto an equivalent trace it adopts the target's writes") {
    Alignment moved = transfer_alignment(net, res.alignment, e1, e2, pf);
    REQUIRE(moved.size() == 3);
    CHECK(moved[0].kind == MoveKind::Sync);
    // The source run matched e1's x = 2, so the transfer copies e2's 3.
    CHECK(written(moved[0], "x") == Value::integer(Int(3)));
    CHECK(alignment_cost(net, e2, moved, pf) == 0);
    CHECK(check_alignment(net, e2, moved) == std::nullopt);
  }
}

TEST_CASE("transfer swaps a write that already hit the target's value") {
  DPN net = chain_net();
  PenaltyProfile pf = PenaltyProfile::standard();
  LogTrace source{"s", {ev("a", {{"x", 2}}), ev("b", {{"y", 1}})}};
  LogTrace target{"t", {ev("a", {{"x", 3}}), ev("b", {{"y", 1}})}};

  // A valid but deliberately imperfect alignment: the a write lands on 3,
  // which mismatches the source event and happens to equal the target's.
  Alignment gamma;
  gamma.push_back(Move{MoveKind::Sync, 0,
                       {0, {{AnnVar{"x", true}, Value::integer(Int(3))}}}});
  gamma.push_back(Move{MoveKind::Sync, 1,
                       {1, {{AnnVar{"y", true}, Value::integer(Int(1))}}}});
  gamma.push_back(Move{MoveKind::Model, 0, {2, {}}});
  REQUIRE(alignment_cost(net, source, gamma, pf) == 1);

  Alignment moved = transfer_alignment(net, gamma, source, target, pf);
  // Swapping in the source's 2 keeps exactly one mismatch on the target.
  CHECK(written(moved[0], "x") == Value::integer(Int(2)));
  CHECK(alignment_cost(net, target, moved, pf) == 1);
  CHECK(check_alignment(net, target, moved) == std::nullopt);
}

TEST_CASE("transfer rejects traces it cannot possibly cover") {
  DPN net = chain_net();
  PenaltyProfile pf = PenaltyProfile::standard();
  LogTrace e1{"e1", {ev("a", {{"x", 2}}), ev("b", {{"y", 1}})}};
  ConformanceResult res = conformance(net, e1, pf,
                                      fixtures::conformance_options());

  SUBCASE("length mismatch") {
    LogTrace shorter{"short", {ev("a", {{"x", 2}})}};
    CHECK_THROWS_WITH_AS(
        transfer_alignment(net, res.alignment, e1, shorter, pf),
        doctest::Contains("equal length"), AlignError);
  }

  SUBCASE("sync move with a missing write") {
    Alignment broken = res.alignment;
    broken[0].firing.beta.clear();
    CHECK_THROWS_WITH_AS(transfer_alignment(net, broken, e1, e1, pf),
                         doctest::Contains("omits the written value"),
                         AlignError);
  }

  SUBCASE("traces from different clusters change the cost") {
    // y is unrestricted (t_d compares it against an expression), so the
    // transfer keeps the forced y write; differing d events then price the
    // two alignments apart, which is the documented misuse signal.
    LogTrace s3{"s3",
                {ev("a", {{"x", 2}}), ev("b", {{"y", 1}}), ev("d", {{"y", 1}})}};
    LogTrace t3{"t3",
                {ev("a", {{"x", 2}}), ev("b", {{"y", 1}}), ev("d", {{"y", 2}})}};
    Alignment gamma;
    gamma.push_back(Move{MoveKind::Sync, 0,
                         {0, {{AnnVar{"x", true}, Value::integer(Int(2))}}}});
    gamma.push_back(Move{MoveKind::Sync, 1,
                         {1, {{AnnVar{"y", true}, Value::integer(Int(1))}}}});
    gamma.push_back(Move{MoveKind::Model, 0, {2, {}}});
    gamma.push_back(Move{MoveKind::Sync, 2,
                         {3, {{AnnVar{"y", true}, Value::integer(Int(2))}}}});
    REQUIRE(alignment_cost(net, s3, gamma, pf) == 1);
    CHECK_THROWS_WITH_AS(transfer_alignment(net, gamma, s3, t3, pf),
                         doctest::Contains("but the source alignment costs"),
                         AlignError);
  }
}

TEST_CASE("alignment rows and table render both sides") {
  DPN net = chain_net();
  LogTrace trace = fitting_trace();
  ConformanceResult res = conformance(net, trace, PenaltyProfile::standard(),
                                      fixtures::conformance_options());
  auto rows = alignment_rows(net, trace, res.alignment);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "a{x=2}");
  CHECK(rows[0][1] == "a{x'=2}");
  CHECK(rows[0][2] == "sync");
  CHECK(rows[2][0] == ">>");
  CHECK(rows[2][1] == "tau(t_tau)");
  CHECK(rows[2][2] == "model");

  std::string table = alignment_table(net, trace, res.alignment);
  CHECK(table.find("log event") != std::string::npos);
  CHECK(table.find("move") != std::string::npos);
  CHECK(table.find("a{x=2}") != std::string::npos);
  CHECK(table.find(">>") != std::string::npos);
}
