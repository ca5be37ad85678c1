#include <doctest.h>

#include <set>

#include "drt/props.hpp"
#include "helpers.hpp"

using namespace drt;

namespace {

std::set<std::pair<Label, TermRef>> step_set(Sos& sos, TermRef t) {
  std::set<std::pair<Label, TermRef>> out;
  for (const Step& s : sos.action_steps(t)) out.insert({s.label, s.target});
  return out;
}

// Relational re-reading of the sigma rules, used as a determinism oracle.
std::set<TermRef> sigma_candidates(Sos& sos, TermRef t) {
  std::set<TermRef> out;
  auto l = [&](int i) { return t->kids[size_t(i)]; };
  switch (t->kind) {
    case Kind::Act:
    case Kind::Timeout:
      return out;
    case Kind::Alt: {
      auto xs = sigma_candidates(sos, l(0));
      auto ys = sigma_candidates(sos, l(1));
      if (ys.empty())
        for (TermRef x : xs) out.insert(x);
      if (xs.empty())
        for (TermRef y : ys) out.insert(y);
      for (TermRef x : xs)
        for (TermRef y : ys) out.insert(mk_alt(x, y));
      return out;
    }
    case Kind::Seq: {
      for (TermRef x : sigma_candidates(sos, l(0)))
        out.insert(mk_seq(x, l(1)));
      return out;
    }
    case Kind::Delay:
      out.insert(l(0));
      return out;
    case Kind::Par:
    case Kind::LeftMerge:
    case Kind::CommMerge: {
      for (TermRef x : sigma_candidates(sos, l(0)))
        for (TermRef y : sigma_candidates(sos, l(1)))
          out.insert(t->is(Kind::Par)         ? mk_par(x, y)
                     : t->is(Kind::LeftMerge) ? mk_left_merge(x, y)
                                              : mk_comm_merge(x, y));
      return out;
    }
    case Kind::Encap: {
      for (TermRef x : sigma_candidates(sos, l(0)))
        out.insert(mk_encap(t->set, x));
      return out;
    }
    case Kind::Abstr: {
      for (TermRef x : sigma_candidates(sos, l(0)))
        out.insert(mk_abstr(t->set, x));
      return out;
    }
    case Kind::Rec:
      return sigma_candidates(sos, sos.unfold(t));
    case Kind::TimeFree:
      out.insert(t);
      return out;
    default:
      return out;
  }
}

}  // namespace

TEST_CASE("action steps of the constants") {
  Sos sos(test_acts());
  CHECK(step_set(sos, T("u(a)")) ==
        std::set<std::pair<Label, TermRef>>{{*test_acts().find("a"), nullptr}});
  CHECK(sos.action_steps(T("delta")).empty());
  CHECK(sos.action_steps(T("sigma(u(a))")).empty());
}

TEST_CASE("parallel composition interleaves and communicates") {
  Sos sos(test_acts());
  auto steps = step_set(sos, T("u(a) || u(b)"));
  // a to the b-side, b to the a-side, and the communication c to termination
  CHECK(steps.size() == 3);
  CHECK(steps.count({*test_acts().find("a"), T("u(b)")}));
  CHECK(steps.count({*test_acts().find("b"), T("u(a)")}));
  CHECK(steps.count({*test_acts().find("c"), nullptr}));
}

TEST_CASE("abstraction renames to the silent step") {
  Sos sos(test_acts());
  auto steps = step_set(sos, T("hide({a}, u(a))"));
  CHECK(steps == std::set<std::pair<Label, TermRef>>{{kTau, nullptr}});
}

TEST_CASE("timeout strips its operator from targets") {
  Sos sos(test_acts());
  auto steps = step_set(sos, T("to(u(a) . u(b))"));
  CHECK(steps.count({*test_acts().find("a"), T("u(b)")}));
}

TEST_CASE("sigma successors") {
  Sos sos(test_acts());
  CHECK(sos.sigma_step(T("sigma(u(a))")) == T("u(a)"));
  CHECK(sos.sigma_step(T("u(a) + sigma(u(b))")) == T("u(b)"));
  CHECK_FALSE(sos.sigma_step(T("u(a)")).has_value());
  CHECK(sos.sigma_step(T("sigma(u(a)) + sigma(u(b))")) == T("u(a) + u(b)"));
  CHECK_FALSE(sos.sigma_step(T("to(sigma(u(a)))")).has_value());
  CHECK_FALSE(sos.sigma_step(T("sigma(u(a)) || u(b)")).has_value());
}

TEST_CASE("shift rewrite") {
  Sos sos(test_acts());
  CHECK(sos.shift_term(T("u(a)")) == T("delta"));
  CHECK(sos.shift_term(T("sigma(u(a))")) == T("u(a)"));
  // shift(u(a) . u(b)) collapses through the deadlock prefix
  CHECK(sos.shift_term(T("u(a) . u(b)")) == T("delta"));
  CHECK(sos.shift_term(T("sigma(u(a)) + u(b)")) == T("u(a) + delta"));
}

TEST_CASE("shift agrees with the sigma successor up to strong bisimilarity") {
  for (uint64_t seed = 0; seed < 120; ++seed) {
    TermRef t = gen_closed_term(seed * 17 + 3, 1 + int(seed % 6));
    Sos sos(harness_actions());
    TermRef shifted = sos.shift_term(t);
    auto nx = sos.sigma_step(t);
    TermRef reference = nx ? *nx : delta_const();
    TwoPhaseLts a = explore(sos, shifted, 4000);
    TwoPhaseLts b = explore(sos, reference, 4000);
    UnionGraph u = make_union(a, b);
    CHECK(strong_bisim(u.lts, u.root1, u.root2).yes());
  }
}

TEST_CASE("sigma determinism against the relational oracle") {
  for (uint64_t seed = 0; seed < 150; ++seed) {
    TermRef t = gen_closed_term(seed * 7 + 1, 1 + int(seed % 6));
    Sos sos(harness_actions());
    std::set<TermRef> cand = sigma_candidates(sos, t);
    auto fn = sos.sigma_step(t);
    CHECK(cand.size() <= 1);
    if (fn) {
      REQUIRE(cand.size() == 1);
      CHECK(*cand.begin() == *fn);
    } else {
      CHECK(cand.empty());
    }
  }
}

TEST_CASE("stamped steps") {
  Sos sos(test_acts());
  {
    StampedResult r = sos.stamped_steps(T("sigma^2(u(a))"), 3);
    REQUIRE(r.steps.size() == 1);
    CHECK(r.steps[0].stamp == 2);
    CHECK(r.steps[0].target == nullptr);
    CHECK_FALSE(r.cycle_open);
  }
  {
    StampedResult r = sos.stamped_steps(T("a"), 2);  // delayable action
    CHECK(r.steps.size() == 3);
    std::set<uint32_t> stamps;
    for (auto& s : r.steps) stamps.insert(s.stamp);
    CHECK(stamps == std::set<uint32_t>{0, 1, 2});
    CHECK(r.cycle_open);
  }
  CHECK(sos.stamped_steps(T("delta"), 5).steps.empty());
}

TEST_CASE("idling") {
  Sos sos(test_acts());
  CHECK(sos.idling(T("u(a)"), 0));
  CHECK_FALSE(sos.idling(T("u(a)"), 1));
  CHECK(sos.idling(T("sigma^3(u(a))"), 3));
  CHECK_FALSE(sos.idling(T("sigma^3(u(a))"), 4));
}

TEST_CASE("stamped steps imply idling") {
  for (uint64_t seed = 0; seed < 80; ++seed) {
    TermRef t = gen_closed_term(seed * 5 + 2, 1 + int(seed % 6));
    Sos sos(harness_actions());
    StampedResult r = sos.stamped_steps(t, 10);
    for (auto& s : r.steps) CHECK(sos.idling(t, s.stamp));
  }
}

TEST_CASE("activeness") {
  Sos sos(test_acts());
  auto active_of = [&](const std::string& text) {
    TwoPhaseLts l = explore(sos, T(text), 1000);
    std::vector<bool> act = activeness(l);
    return bool(act[size_t(l.root)]);
  };
  CHECK(active_of("u(a)"));
  CHECK_FALSE(active_of("sigma(u(a))"));
  // only a silent step to a dormant term: not active
  CHECK_FALSE(active_of("tau . sigma(u(a))"));
  CHECK(active_of("tau"));
  // silent step to an active term
  CHECK(active_of("tau . u(a)"));
  CHECK_FALSE(active_of("delta"));
}

TEST_CASE("recursion unfolds on demand") {
  Sos sos(test_acts());
  TermRef t = T("<X | X = u(a) . X>");
  auto steps = sos.action_steps(t);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label == *test_acts().find("a"));
  CHECK(canonicalize(steps[0].target) == canonicalize(t));
}

TEST_CASE("unguarded recursion is reported, not diverging") {
  int x = var_id("UG");
  SpecRef bad = intern_spec({{x, mk_alt(T("u(a)"), mk_var(x))}}, "");
  Sos sos(test_acts());
  CHECK_THROWS_AS(sos.action_steps(mk_rec(x, bad)), TermError);
}

TEST_CASE("time-free projection operator saturates over idling") {
  Sos sos(test_acts());
  auto steps = step_set(sos, T("tf(u(a) + sigma(u(b)))"));
  CHECK(steps.count({*test_acts().find("a"), nullptr}));
  CHECK(steps.count({*test_acts().find("b"), nullptr}));
  CHECK(sos.sigma_step(T("tf(u(a))")) == T("tf(u(a))"));
}
