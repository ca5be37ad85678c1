#include <doctest.h>

#include "drt/props.hpp"
#include "helpers.hpp"

using namespace drt;

TEST_CASE("terms parse to the expected shapes") {
  TermRef p = T("u(a) . sigma(u(b))");
  REQUIRE(p->is(Kind::Seq));
  CHECK(p->kids[0]->is(Kind::Act));
  CHECK(p->kids[1]->is(Kind::Delay));

  // bare names are delayable-action sugar
  TermRef a = T("a");
  REQUIRE(a->is(Kind::Rec));
  CHECK(a == delayable(*test_acts().find("a")));

  // precedence: seq > merges > alt
  TermRef t = T("u(a) . u(b) || u(c) + u(d)");
  REQUIRE(t->is(Kind::Alt));
  CHECK(t->kids[0]->is(Kind::Par));
  CHECK(t->kids[0]->kids[0]->is(Kind::Seq));
}

TEST_CASE("check directives parse") {
  Model m = parse_model(
      "actions a, b;\n"
      "check da-rb u(a) . tau . sigma(u(b)) ~ u(a) . sigma(u(b)) expect yes;\n");
  REQUIRE(m.checks.size() == 1);
  CHECK(m.checks[0].rel == Rel::DormancyAware);
  REQUIRE(m.checks[0].expect.has_value());
  CHECK(*m.checks[0].expect);
}

TEST_CASE("print/parse round trip") {
  for (uint64_t seed = 0; seed < 150; ++seed) {
    GenOptions o;
    TermRef t = gen_closed_term(seed * 61 + 7, 1 + int(seed % 7), o);
    // the harness and test model share the same alphabet layout
    std::string text = term_to_text(t, test_acts());
    CAPTURE(text);
    TermRef back = T(text);
    CHECK(canonicalize(back) == canonicalize(t));
  }
}

TEST_CASE("round trip covers every constructor") {
  for (const char* text :
       {"u(a) . (u(b) + tau) + delta", "sigma^3(u(a)) |_ (u(b) | u(c))",
        "encap({a,b}, hide({c}, to(u(a) || u(b))))", "tf(sigma(u(a)))",
        "sigma*2(u(a) . u(b))", "<X | X = u(a) . Y; Y = sigma(X) + u(b)>",
        "a . b . delta"}) {
    TermRef t = T(text);
    CHECK(canonicalize(T(term_to_text(t, test_acts()))) == canonicalize(t));
  }
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_model("actions a;\nproc P = u(a) +;\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown names are rejected") {
  CHECK_THROWS_AS(parse_model("actions a;\nproc P = u(zz);\n"), ParseError);
  CHECK_THROWS_AS(parse_model("actions a;\nproc P = Q;\n"), ParseError);
  CHECK_THROWS_AS(
      parse_model("actions a;\ncheck nosuchrel u(a) ~ u(a);\n"), ParseError);
}

TEST_CASE("unguarded specifications are rejected at parse time") {
  CHECK_THROWS_AS(parse_model("actions a;\nspec S { X = X + u(a); }\n"),
                  TermError);
}

TEST_CASE("inline specifications bind their variables") {
  TermRef t = T("<X | X = u(a) . Y; Y = u(b) . X>");
  REQUIRE(t->is(Kind::Rec));
  CHECK(t->spec->eqs.size() == 2);
  CHECK(is_closed(t));
  // unbound variables in inline specs are errors
  CHECK_THROWS_AS(T("<X | X = u(a) . Z>"), TermError);
}

TEST_CASE("comm declarations validate") {
  CHECK_THROWS_AS(parse_model("actions a, b;\ncomm a | b = zz;\n"), ParseError);
  // conflicting entries
  CHECK_THROWS_AS(
      parse_model("actions a, b, c, d;\ncomm a | b = c;\ncomm b | a = d;\n"),
      ParseError);
}

TEST_CASE("model process lookup covers specs") {
  Model m = parse_model(
      "actions a;\n"
      "spec S { X = u(a) . X; }\n"
      "proc P = S;\n");
  CHECK(m.proc("P") == m.proc("S"));
}
