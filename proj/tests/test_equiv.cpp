#include <doctest.h>

#include "drt/props.hpp"
#include "helpers.hpp"

using namespace drt;

TEST_CASE("strong bisimilarity") {
  CHECK(rel_yes(Rel::Strong, "u(a) + u(a)", "u(a)"));
  CHECK(rel_ans(Rel::Strong, "u(a)", "u(b)") == Answer::No);
  // hand-expanded merge with communication
  CHECK(rel_yes(Rel::Strong, "u(a) || u(b)",
                "u(a) . u(b) + u(b) . u(a) + u(c)"));
  // termination differs from deadlock
  CHECK(rel_ans(Rel::Strong, "u(a)", "u(a) . delta") == Answer::No);
  CHECK(rel_ans(Rel::Strong, "tau", "delta") == Answer::No);
  // sigma is an ordinary label here
  CHECK(rel_ans(Rel::Strong, "sigma(u(a))", "u(a)") == Answer::No);
}

TEST_CASE("branching (two-phase, unrooted)") {
  CHECK(rel_yes(Rel::BranchingTp, "u(a) . tau", "u(a)"));
  CHECK(rel_yes(Rel::BranchingTp, "tau . u(a)", "u(a)"));
  // a silent step in front of a delay is not erasable
  CHECK(rel_ans(Rel::BranchingTp, "u(a) . tau . sigma(u(b))",
                "u(a) . sigma(u(b))") == Answer::No);
}

TEST_CASE("rooted branching (two-phase)") {
  CHECK(rel_yes(Rel::RootedTp, "u(a) . tau", "u(a)"));
  CHECK(rel_ans(Rel::RootedTp, "u(a)", "u(b)") == Answer::No);
  CHECK(rel_ans(Rel::RootedTp, "tau . u(a)", "u(a)") == Answer::No);
  CHECK(rel_yes(Rel::RootedTp, "u(a)", "u(a)"));
}

TEST_CASE("rooted ts-branching") {
  // closed DRB2-style instance with a delaying alternative
  CHECK(rel_yes(Rel::RootedTs,
                "u(a) . (tau . (to(u(b)) + sigma(u(c))) + to(u(b)))",
                "u(a) . (to(u(b)) + sigma(u(c)))"));
  CHECK(rel_ans(Rel::RootedTs, "tau . u(a)", "u(a)") == Answer::No);
  CHECK(rel_yes(Rel::RootedTs, "u(a) . sigma(u(b))", "u(a) . sigma(u(b))"));
  // deadlock now differs from deadlock after one slice
  CHECK(rel_ans(Rel::RootedTs, "delta", "sigma(delta)") == Answer::No);
  CHECK(rel_ans(Rel::RootedTs, "u(a)", "u(a) + sigma(delta)") == Answer::No);
}

TEST_CASE("dormancy-aware rooted branching") {
  CHECK(rel_yes(Rel::DormancyAware, "u(a) . sigma(u(b))",
                "u(a) . tau . sigma(u(b))"));
  CHECK(rel_ans(Rel::RootedTs, "u(a) . sigma(u(b))",
                "u(a) . tau . sigma(u(b))") == Answer::No);
  // closed instance of the dormancy axiom with n = 0
  CHECK(rel_yes(Rel::DormancyAware, "u(a) . (tau . sigma(u(b)) + delta)",
                "u(a) . (sigma(u(b)) + delta)"));
  // the root silent step still has to be matched
  CHECK(rel_ans(Rel::DormancyAware, "tau . sigma(u(a))", "sigma(u(a))") ==
        Answer::No);
  // deadlock timing still matters
  CHECK(rel_ans(Rel::DormancyAware, "delta", "sigma(delta)") == Answer::No);
}

TEST_CASE("untimed rooted branching") {
  // silent cycle with an exit collapses to the exit
  CHECK(rel_yes(Rel::UntimedRb, "hide({a}, <X | X = u(a) . X + u(b)>)",
                "u(b)"));
  CHECK(rel_ans(Rel::UntimedRb, "u(a) . u(b)", "u(a)") == Answer::No);
  CHECK(rel_yes(Rel::UntimedRb, "tf(u(a) . sigma(u(b)))", "a . b"));
}

TEST_CASE("rooted two-phase check can answer unknown only off the root") {
  // The root pair itself failing the root condition is decisive.
  Verdict v = rel_check(Rel::RootedTp, "tau . u(a)", "u(a)");
  CHECK(v.answer == Answer::No);
}

TEST_CASE("theorem-level coincidence of the two rooted checks") {
  for (uint64_t seed = 0; seed < 150; ++seed) {
    TermRef t1 = gen_closed_term(seed * 3 + 1, 1 + int(seed % 5));
    TermRef t2 = seed % 3 ? gen_closed_term(seed * 3 + 2, 1 + int(seed % 5))
                          : t1;
    Sos sos(harness_actions());
    Verdict tp = check_relation(sos, Rel::RootedTp, t1, t2, 4000);
    Verdict ts = check_relation(sos, Rel::RootedTs, t1, t2, 4000);
    CHECK_FALSE((tp.answer == Answer::Yes && ts.answer == Answer::No));
    CHECK_FALSE((tp.answer == Answer::No && ts.answer == Answer::Yes));
  }
}

TEST_CASE("yes verdicts carry validating witnesses") {
  Sos sos(test_acts());
  {
    TwoPhaseLts a = explore(sos, T("u(a) + u(a)"), 100);
    TwoPhaseLts b = explore(sos, T("u(a)"), 100);
    UnionGraph u = make_union(a, b);
    Verdict v = strong_bisim(u.lts, u.root1, u.root2);
    REQUIRE(v.yes());
    CHECK(validate_witness_strong(u.lts, v));
  }
  {
    TwoPhaseLts a = explore(sos, T("u(a) . tau"), 100);
    TwoPhaseLts b = explore(sos, T("u(a)"), 100);
    UnionGraph u = make_union(a, b);
    Verdict v = rooted_branching_ts(u.lts, u.root1, u.root2);
    REQUIRE(v.yes());
    CHECK(validate_witness_ts(u.lts, v, false));
  }
  {
    TwoPhaseLts a = explore(sos, T("u(a) . tau . sigma(u(b))"), 100);
    TwoPhaseLts b = explore(sos, T("u(a) . sigma(u(b))"), 100);
    UnionGraph u = make_union(a, b);
    Verdict v = dormancy_aware_rb(u.lts, u.root1, u.root2);
    REQUIRE(v.yes());
    CHECK(validate_witness_ts(u.lts, v, true));
  }
  {
    UntimedLts a = time_free_project(explore(sos, T("tf(u(a))"), 100));
    UntimedLts b = time_free_project(explore(sos, T("a"), 100));
    UnionUntimed u = make_union(a, b);
    Verdict v = rooted_branching_untimed(u.lts, u.root1, u.root2);
    REQUIRE(v.yes());
    CHECK(validate_witness_untimed(u.lts, v));
  }
}

TEST_CASE("witness validation on random yes pairs") {
  int validated = 0;
  for (uint64_t seed = 0; seed < 60 && validated < 15; ++seed) {
    TermRef t = gen_closed_term(seed * 41 + 3, 4);
    Sos sos(harness_actions());
    TwoPhaseLts a = explore(sos, t, 4000);
    TwoPhaseLts b = explore(sos, canonicalize(t), 4000);
    UnionGraph u = make_union(a, b);
    Verdict v = rooted_branching_ts(u.lts, u.root1, u.root2);
    if (!v.yes()) continue;
    ++validated;
    CHECK(validate_witness_ts(u.lts, v, false));
  }
  CHECK(validated > 0);
}

TEST_CASE("no-verdicts carry evidence") {
  Verdict v = rel_check(Rel::RootedTs, "u(a)", "u(b)");
  REQUIRE(v.answer == Answer::No);
  CHECK_FALSE(v.evidence.empty());
}
