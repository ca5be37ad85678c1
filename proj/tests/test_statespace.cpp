#include <doctest.h>

#include "drt/props.hpp"
#include "helpers.hpp"

using namespace drt;

TEST_CASE("explore a sequential composition") {
  Sos sos(test_acts());
  TwoPhaseLts l = explore(sos, T("u(a) . u(b)"), 100);
  CHECK(l.states.size() == 3);  // root, u(b), termination
  CHECK(l.action_edge_count() == 2);
  CHECK(l.sigma_edge_count() == 0);
}

TEST_CASE("explore a delayable action") {
  Sos sos(test_acts());
  TwoPhaseLts l = explore(sos, T("<X | X = u(a) + sigma(X)>"), 100);
  CHECK(l.states.size() == 2);
  CHECK(l.sigma_next[size_t(l.root)] == l.root);  // sigma self-loop
}

TEST_CASE("explore trips the state bound") {
  // X grows unboundedly in parallel width.
  Sos sos(test_acts());
  TermRef t = T("<X | X = u(a) . (X || X)>");
  CHECK_THROWS_AS(explore(sos, t, 100), StateBoundExceeded);
}

TEST_CASE("sigma lassos") {
  Sos sos(test_acts());
  {
    TwoPhaseLts l = explore(sos, T("sigma^2(u(a))"), 100);
    Lasso ls = sigma_lasso(l, l.root);
    CHECK(ls.path.size() == 3);
    CHECK(ls.cycle_len == 0);
    CHECK(ls.idles(2));
    CHECK_FALSE(ls.idles(3));
  }
  {
    TwoPhaseLts l = explore(sos, T("a"), 100);
    Lasso ls = sigma_lasso(l, l.root);
    CHECK(ls.path.size() == 1);
    CHECK(ls.cycle_len == 1);
    CHECK(ls.idles(1000));
  }
  {
    TwoPhaseLts l = explore(sos, T("u(a)"), 100);
    StateId tick = kNoState;
    for (size_t s = 0; s < l.states.size(); ++s)
      if (l.is_tick(StateId(s))) tick = StateId(s);
    REQUIRE(tick != kNoState);
    Lasso ls = sigma_lasso(l, tick);
    CHECK(ls.path.size() == 1);
    CHECK(ls.cycle_len == 0);
  }
}

TEST_CASE("projection erases timing") {
  Sos sos(test_acts());
  UntimedLts a = time_free_project(explore(sos, T("sigma(u(a))"), 100));
  UntimedLts b = time_free_project(explore(sos, T("u(a)"), 100));
  CHECK(a.states.size() == b.states.size());
  UnionUntimed u = make_union(a, b);
  CHECK(rooted_branching_untimed(u.lts, u.root1, u.root2).yes());
}

TEST_CASE("projection saturates sigma chains") {
  Sos sos(test_acts());
  UntimedLts l = time_free_project(explore(sos, T("u(a) + sigma(u(b))"), 100));
  std::set<Label> roots;
  for (const Edge& e : l.edges[size_t(l.root)]) roots.insert(e.label);
  CHECK(roots ==
        std::set<Label>{*test_acts().find("a"), *test_acts().find("b")});
}

TEST_CASE("projection of a sigma-free graph keeps its shape") {
  Sos sos(test_acts());
  TwoPhaseLts timed = explore(sos, T("u(a) . u(b) + u(c)"), 100);
  UntimedLts l = time_free_project(timed);
  CHECK(l.states.size() == timed.states.size());
  size_t edges = 0;
  for (auto& es : l.edges) edges += es.size();
  CHECK(edges == timed.action_edge_count());
}

TEST_CASE("exploration is canonical-form stable") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    TermRef t = gen_closed_term(seed * 19 + 11, 1 + int(seed % 6));
    Sos sos(harness_actions());
    TwoPhaseLts a = explore(sos, t, 4000);
    TwoPhaseLts b = explore(sos, canonicalize(t), 4000);
    CHECK(a.states.size() == b.states.size());
    CHECK(a.action_edge_count() == b.action_edge_count());
    CHECK(a.sigma_edge_count() == b.sigma_edge_count());
  }
}

TEST_CASE("abstraction commutes with exploration up to relabelling") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    GenOptions o;
    o.allow_abstraction = false;
    TermRef t = gen_closed_term(seed * 23 + 9, 4, o);
    Sos sos(harness_actions());
    std::vector<Label> iset{*harness_actions().find("a"),
                            *harness_actions().find("d")};
    TwoPhaseLts la = explore(sos, mk_abstr(iset, t), 4000);
    TwoPhaseLts lb = explore(sos, t, 4000);
    // relabel lb in place
    for (auto& es : lb.edges)
      for (auto& e : es)
        if (std::find(iset.begin(), iset.end(), e.label) != iset.end())
          e.label = kTau;
    UnionGraph u = make_union(la, lb);
    CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  }
}

TEST_CASE("encapsulation commutes with edge deletion") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    GenOptions o;
    o.allow_abstraction = false;
    TermRef t = gen_closed_term(seed * 29 + 15, 4, o);
    Sos sos(harness_actions());
    std::vector<Label> hset{*harness_actions().find("b")};
    TwoPhaseLts la = explore(sos, mk_encap(hset, t), 4000);
    TwoPhaseLts lb = explore(sos, t, 4000);
    for (auto& es : lb.edges)
      es.erase(std::remove_if(es.begin(), es.end(),
                              [&](const Edge& e) {
                                return e.label == hset[0];
                              }),
               es.end());
    UnionGraph u = make_union(la, lb);
    CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  }
}

TEST_CASE("dump format is stable") {
  Sos sos(test_acts());
  TwoPhaseLts l = explore(sos, T("u(a) . sigma(u(b))"), 100);
  std::string dump = dump_lts(l, test_acts());
  CHECK(dump ==
        "lts 4 2 1 root=0\n"
        "s0: u(a) . sigma(u(b))\n"
        "s1: sigma(u(b))\n"
        "s2: u(b)\n"
        "s3: TICK\n"
        "s0 -a-> s1\n"
        "s2 -b-> s3\n"
        "s1 -SIGMA-> s2\n");
}

TEST_CASE("untimed dump has no sigma edges") {
  Sos sos(test_acts());
  UntimedLts l = time_free_project(explore(sos, T("sigma(u(a))"), 100));
  std::string dump = dump_lts(l, test_acts());
  CHECK(dump.find("SIGMA") == std::string::npos);
  CHECK(dump.substr(0, 4) == "lts ");
}
