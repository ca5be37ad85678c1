#include <doctest.h>

#include "drt/props.hpp"
#include "drt/rewrite.hpp"
#include "helpers.hpp"

using namespace drt;

TEST_CASE("canonicalize merges duplicate summands") {
  CHECK(canonicalize(T("u(a) + u(a)")) == canonicalize(T("u(a)")));
}

TEST_CASE("canonicalize drops deadlock summands next to others") {
  CHECK(canonicalize(T("u(a) + delta")) == canonicalize(T("u(a)")));
  // sole summand kept
  CHECK(canonicalize(T("delta")) == T("delta"));
}

TEST_CASE("canonicalize flattens and sorts alternatives") {
  TermRef l = canonicalize(T("(u(a) + u(b)) + u(c)"));
  TermRef r = canonicalize(T("u(c) + (u(b) + u(a))"));
  CHECK(l == r);
  CHECK(l->is(Kind::Alt));
}

TEST_CASE("canonicalize is idempotent on random terms") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    TermRef t = gen_closed_term(seed, 1 + int(seed % 7));
    TermRef c1 = canonicalize(t);
    CHECK(canonicalize(c1) == c1);
  }
}

TEST_CASE("canonicalize preserves strong bisimilarity on random terms") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    TermRef t = gen_closed_term(seed * 31 + 7, 1 + int(seed % 6));
    Sos sos(harness_actions());
    TwoPhaseLts a = explore(sos, t, 4000);
    TwoPhaseLts b = explore(sos, canonicalize(t), 4000);
    UnionGraph u = make_union(a, b);
    CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  }
}

TEST_CASE("substitution") {
  int x = var_id("X");
  std::map<int, TermRef> bind{{x, T("u(a)")}};
  CHECK(substitute(mk_var(x), bind) == T("u(a)"));
  CHECK(substitute(mk_seq(T("u(a)"), mk_var(x)), {{x, T("sigma(u(b))")}}) ==
        T("u(a) . sigma(u(b))"));
  // bound occurrences inside a recursion constant are untouched
  TermRef rec = T("<X | X = u(a) . X>");
  CHECK(substitute(rec, bind) == rec);
}

TEST_CASE("guardedness") {
  int x = var_id("X");
  SpecRef guarded = intern_spec({{x, mk_seq(T("u(a)"), mk_var(x))}}, "");
  CHECK(check_guarded(guarded));

  SpecRef unguarded = intern_spec({{x, mk_alt(T("u(a)"), mk_var(x))}}, "");
  CHECK_FALSE(check_guarded(unguarded));

  SpecRef sigma_guarded = intern_spec({{x, mk_delay(mk_var(x))}}, "");
  CHECK(check_guarded(sigma_guarded));

  // tau is not a guard
  SpecRef tau_guarded = intern_spec({{x, mk_seq(tau_const(), mk_var(x))}}, "");
  CHECK_FALSE(check_guarded(tau_guarded));

  // an abstraction operator above the occurrence spoils the guard
  SpecRef abstracted = intern_spec(
      {{x, mk_abstr({*test_acts().find("a")},
                    mk_seq(T("u(a)"), mk_var(x)))}},
      "");
  CHECK_FALSE(check_guarded(abstracted));

  // unfolding makes indirectly guarded specifications pass
  int y = var_id("Y");
  SpecRef indirect = intern_spec(
      {{x, mk_timeout(mk_var(y))}, {y, mk_seq(T("u(a)"), mk_var(x))}}, "");
  CHECK(check_guarded(indirect));

  // delayable left factors guard what follows
  TermRef buf = T("<B | B = a . b . B>");
  CHECK(check_guarded(buf->spec));
}

TEST_CASE("time iteration expansion") {
  TermRef t = expand_time_iteration(T("sigma*2(u(a))"));
  REQUIRE(t->is(Kind::Rec));
  // X = u(a) + sigma^2(X)
  TermRef rhs = t->spec->rhs_of(t->var);
  CHECK(canonicalize(rhs) ==
        canonicalize(mk_alt(T("u(a)"), mk_delay_n(2, mk_var(t->var)))));

  TermRef plain = T("u(a) . sigma(u(b))");
  CHECK(expand_time_iteration(plain) == plain);

  CHECK_THROWS_AS(expand_time_iteration(T("sigma*0(u(a))")), TermError);
}

TEST_CASE("time iteration semantics matches its defining equation") {
  // sigma*2(u(a)) offers a in slices 0, 2, 4, ...
  Sos sos(test_acts());
  TermRef t = expand_time_iteration(T("sigma*2(u(a))"));
  StampedResult sr = sos.stamped_steps(t, 5);
  std::set<uint32_t> stamps;
  for (auto& st : sr.steps) stamps.insert(st.stamp);
  CHECK(stamps == std::set<uint32_t>{0, 2, 4});
}

TEST_CASE("expansion leaves no time iteration behind") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    TermRef body = gen_closed_term(seed * 91 + 2, 3);
    TermRef t = mk_time_iter(uint32_t(1 + rng.below(3)),
                             mk_alt(body, mk_time_iter(2, T("u(a)"))));
    TermRef e = expand_time_iteration(t);
    std::vector<TermRef> work{e};
    while (!work.empty()) {
      TermRef u = work.back();
      work.pop_back();
      CHECK_FALSE(u->is(Kind::TimeIter));
      for (TermRef k : u->kids) work.push_back(k);
      if (u->is(Kind::Rec))
        for (const auto& eq : u->spec->eqs) work.push_back(eq.rhs);
    }
  }
}

TEST_CASE("flatten_recursion removes nested constants") {
  TermRef nested = T("<X | X = u(a) . <Y | Y = u(b) . Y>>");
  TermRef flat = flatten_recursion(nested);
  REQUIRE(flat->is(Kind::Rec));
  CHECK(flat->spec->eqs.size() == 2);
  for (const auto& eq : flat->spec->eqs) {
    std::vector<TermRef> work{eq.rhs};
    while (!work.empty()) {
      TermRef u = work.back();
      work.pop_back();
      CHECK_FALSE(u->is(Kind::Rec));
      for (TermRef k : u->kids) work.push_back(k);
    }
  }
  CHECK(check_guarded(flat->spec));
  Sos sos(test_acts());
  TwoPhaseLts a = explore(sos, nested, 1000);
  TwoPhaseLts b = explore(sos, flat, 1000);
  UnionGraph u = make_union(a, b);
  CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
}

TEST_CASE("flatten_recursion keeps unnested constants unchanged") {
  TermRef t = T("<X | X = u(a) . X>");
  CHECK(flatten_recursion(t) == t);
}

TEST_CASE("flatten_recursion handles delayable-action sugar") {
  TermRef t = T("<X | X = a . X>");  // bare a is a nested recursion constant
  TermRef flat = flatten_recursion(t);
  CHECK(flat->spec->eqs.size() == 2);
  Sos sos(test_acts());
  TwoPhaseLts g1 = explore(sos, t, 1000);
  TwoPhaseLts g2 = explore(sos, flat, 1000);
  UnionGraph u = make_union(g1, g2);
  CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  CHECK(check_guarded(flat->spec));
}

TEST_CASE("flatten_recursion output stays strongly bisimilar on samples") {
  int done = 0;
  for (uint64_t seed = 0; seed < 80 && done < 20; ++seed) {
    TermRef t = gen_closed_term(seed * 13 + 5, 5);
    if (!t->is(Kind::Rec)) continue;
    bool nested = false;
    for (const auto& eq : t->spec->eqs) {
      std::vector<TermRef> work{eq.rhs};
      while (!work.empty()) {
        TermRef u = work.back();
        work.pop_back();
        nested |= u->is(Kind::Rec);
        for (TermRef k : u->kids) work.push_back(k);
      }
    }
    if (!nested) continue;
    ++done;
    TermRef flat = flatten_recursion(t);
    Sos sos(harness_actions());
    TwoPhaseLts a = explore(sos, t, 4000);
    TwoPhaseLts b = explore(sos, flat, 4000);
    UnionGraph u = make_union(a, b);
    CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  }
}

TEST_CASE("recursion constants are identified up to variable renaming") {
  TermRef a1 = T("<X | X = u(a) + sigma(X)>");
  TermRef a2 = T("<W | W = u(a) + sigma(W)>");
  CHECK(a1 == a2);
  CHECK(a1 == delayable(*test_acts().find("a")));
}
