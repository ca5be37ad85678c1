#include <cctype>
#include <map>
#include <set>

#include "drt/model.hpp"

namespace drt {

TermRef Model::proc(const std::string& name) const {
  for (const auto& [n, t] : procs)
    if (n == name) return t;
  for (const auto& [n, s] : specs)
    if (n == name) return mk_rec(s->eqs.front().var, s);
  throw TermError("unknown process '" + name + "'");
}

bool Model::has_proc(const std::string& name) const {
  for (const auto& [n, t] : procs)
    if (n == name) return true;
  for (const auto& [n, s] : specs)
    if (n == name) return true;
  return false;
}

namespace {

enum class Tok {
  Ident, Number, Semi, Comma, Eq, LBrace, RBrace, LParen, RParen,
  Plus, Dot, ParOp, LeftMergeOp, CommOp, Lt, Gt, Tilde, Caret, Star, End
};

struct Token {
  Tok kind;
  std::string text;
  uint64_t number = 0;
  size_t line = 1, col = 1;
};

struct Lexer {
  const std::string* src_ptr;
  size_t pos = 0, line = 1, col = 1;

  explicit Lexer(const std::string& s) : src_ptr(&s) {}
  const std::string& src() const { return *src_ptr; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  void bump(size_t n = 1) {
    for (size_t i = 0; i < n && pos < src().size(); ++i) {
      if (src()[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_ws() {
    while (pos < src().size()) {
      char c = src()[pos];
      if (c == '/' && pos + 1 < src().size() && src()[pos + 1] == '/') {
        while (pos < src().size() && src()[pos] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  Token next() {
    skip_ws();
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src().size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src()[pos];
    auto one = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      bump();
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < src().size() &&
             (std::isalnum(static_cast<unsigned char>(src()[pos])) ||
              src()[pos] == '_' || src()[pos] == '$' || src()[pos] == '\'' ||
              (src()[pos] == '-' && pos + 1 < src().size() &&
               std::isalpha(static_cast<unsigned char>(src()[pos + 1])))))
        bump();
      t.kind = Tok::Ident;
      t.text = src().substr(start, pos - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < src().size() &&
             std::isdigit(static_cast<unsigned char>(src()[pos])))
        bump();
      t.kind = Tok::Number;
      t.text = src().substr(start, pos - start);
      t.number = std::stoull(t.text);
      return t;
    }
    switch (c) {
      case ';': return one(Tok::Semi);
      case ',': return one(Tok::Comma);
      case '=': return one(Tok::Eq);
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '+': return one(Tok::Plus);
      case '.': return one(Tok::Dot);
      case '<': return one(Tok::Lt);
      case '>': return one(Tok::Gt);
      case '~': return one(Tok::Tilde);
      case '^': return one(Tok::Caret);
      case '*': return one(Tok::Star);
      case '|':
        if (pos + 1 < src().size() && src()[pos + 1] == '|') {
          t.kind = Tok::ParOp;
          t.text = "||";
          bump(2);
          return t;
        }
        if (pos + 1 < src().size() && src()[pos + 1] == '_') {
          t.kind = Tok::LeftMergeOp;
          t.text = "|_";
          bump(2);
          return t;
        }
        t.kind = Tok::CommOp;
        t.text = "|";
        bump();
        return t;
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
    return t;  // unreachable
  }
};

struct Parser {
  Lexer lex;
  Token tok;
  Model& model;
  std::set<std::string> scope_vars;  // spec variables in scope
  unsigned guard_depth;

  Parser(const std::string& text, Model& m, unsigned depth)
      : lex(text), model(m), guard_depth(depth) {
    tok = lex.next();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok.line, tok.col);
  }

  void advance() { tok = lex.next(); }

  bool accept(Tok k) {
    if (tok.kind != k) return false;
    advance();
    return true;
  }

  void expect(Tok k, const char* what) {
    if (tok.kind != k) fail(std::string("expected ") + what);
    advance();
  }

  std::string expect_ident(const char* what) {
    if (tok.kind != Tok::Ident) fail(std::string("expected ") + what);
    std::string s = tok.text;
    advance();
    return s;
  }

  uint64_t expect_number() {
    if (tok.kind != Tok::Number) fail("expected a number");
    uint64_t n = tok.number;
    advance();
    return n;
  }

  bool ident_is(const char* kw) const {
    return tok.kind == Tok::Ident && tok.text == kw;
  }

  // ---- terms ----------------------------------------------------------

  TermRef parse_term_top() { return parse_alt(); }

  TermRef parse_alt() {
    TermRef t = parse_merge();
    while (tok.kind == Tok::Plus) {
      advance();
      t = mk_alt(t, parse_merge());
    }
    return t;
  }

  TermRef parse_merge() {
    TermRef t = parse_seq();
    while (true) {
      if (tok.kind == Tok::ParOp) {
        advance();
        t = mk_par(t, parse_seq());
      } else if (tok.kind == Tok::LeftMergeOp) {
        advance();
        t = mk_left_merge(t, parse_seq());
      } else if (tok.kind == Tok::CommOp) {
        advance();
        t = mk_comm_merge(t, parse_seq());
      } else {
        return t;
      }
    }
  }

  TermRef parse_seq() {
    TermRef t = parse_atom();
    if (tok.kind == Tok::Dot) {
      advance();
      return mk_seq(t, parse_seq());
    }
    return t;
  }

  std::vector<Label> parse_action_set() {
    expect(Tok::LBrace, "'{'");
    std::vector<Label> out;
    if (tok.kind != Tok::RBrace) {
      do {
        Token at = tok;
        std::string n = expect_ident("an action name");
        auto l = model.acts.find(n);
        if (!l || !is_observable(*l))
          throw ParseError("unknown action '" + n + "'", at.line, at.col);
        out.push_back(*l);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrace, "'}'");
    return out;
  }

  TermRef parse_unary(const char* name, TermRef (*wrap)(TermRef)) {
    (void)name;
    expect(Tok::LParen, "'('");
    TermRef t = parse_term_top();
    expect(Tok::RParen, "')'");
    return wrap(t);
  }

  TermRef parse_atom() {
    if (accept(Tok::LParen)) {
      TermRef t = parse_term_top();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (tok.kind == Tok::Lt) return parse_inline_spec();
    if (tok.kind != Tok::Ident) fail("expected a term");
    Token head = tok;
    std::string name = tok.text;
    advance();

    if (name == "u") {
      expect(Tok::LParen, "'('");
      std::string an = expect_ident("an action name");
      expect(Tok::RParen, "')'");
      auto l = model.acts.find(an);
      if (!l)
        throw ParseError("unknown action '" + an + "'", head.line, head.col);
      return mk_act(*l);
    }
    if (name == "tau") return tau_const();
    if (name == "delta") return delta_const();
    if (name == "sigma") {
      if (accept(Tok::Caret)) {
        uint64_t n = expect_number();
        expect(Tok::LParen, "'('");
        TermRef t = parse_term_top();
        expect(Tok::RParen, "')'");
        return mk_delay_n(static_cast<uint32_t>(n), t);
      }
      if (accept(Tok::Star)) {
        uint64_t n = expect_number();
        expect(Tok::LParen, "'('");
        TermRef t = parse_term_top();
        expect(Tok::RParen, "')'");
        return mk_time_iter(static_cast<uint32_t>(n), t);
      }
      expect(Tok::LParen, "'('");
      TermRef t = parse_term_top();
      expect(Tok::RParen, "')'");
      return mk_delay(t);
    }
    if (name == "encap" || name == "hide") {
      expect(Tok::LParen, "'('");
      std::vector<Label> set = parse_action_set();
      expect(Tok::Comma, "','");
      TermRef t = parse_term_top();
      expect(Tok::RParen, "')'");
      return name == "encap" ? mk_encap(std::move(set), t)
                             : mk_abstr(std::move(set), t);
    }
    if (name == "to") return parse_unary("to", mk_timeout);
    if (name == "tf") return parse_unary("tf", mk_time_free);

    // Plain name: spec variable in scope, action (delayable sugar), or a
    // declared process / specification.
    if (scope_vars.count(name)) return mk_var(var_id(name));
    if (auto l = model.acts.find(name)) {
      if (is_observable(*l)) return delayable(*l);
      fail("tau/delta have no delayable shorthand");
    }
    if (model.has_proc(name)) return model.proc(name);
    throw ParseError("unknown name '" + name + "'", head.line, head.col);
  }

  TermRef parse_inline_spec() {
    expect(Tok::Lt, "'<'");
    std::string entry = expect_ident("a variable name");
    expect(Tok::CommOp, "'|'");
    SpecRef spec = parse_spec_body(entry, Tok::Gt, "");
    expect(Tok::Gt, "'>'");
    return mk_rec(var_id(entry), spec);
  }

  // Parses equations up to (not consuming) the closing token. The defined
  // variables are collected first by scanning for IDENT '=' at nesting
  // depth zero, so forward references inside right-hand sides resolve.
  SpecRef parse_spec_body(const std::string& must_contain, Tok closer,
                          const std::string& label) {
    // Save lexer state for the pre-scan.
    Lexer save_lex = lex;
    Token save_tok = tok;
    std::set<std::string> vars_here;
    {
      int depth = 0;
      Token t = tok;
      Lexer probe = lex;
      while (t.kind != Tok::End) {
        if (t.kind == Tok::Lt) ++depth;
        if (t.kind == Tok::Gt) {
          if (closer == Tok::Gt && depth == 0) break;
          --depth;
        }
        if (t.kind == Tok::RBrace && closer == Tok::RBrace && depth == 0)
          break;
        if (t.kind == Tok::Ident && depth == 0) {
          Token nt = probe.next();
          if (nt.kind == Tok::Eq) vars_here.insert(t.text);
          t = nt;
          continue;
        }
        t = probe.next();
      }
    }
    lex = save_lex;
    tok = save_tok;
    if (!vars_here.count(must_contain))
      fail("specification must define '" + must_contain + "'");

    std::set<std::string> outer = scope_vars;
    for (const auto& v : vars_here) scope_vars.insert(v);
    std::vector<RecEq> eqs;
    while (tok.kind != closer) {
      Token vt = tok;
      std::string v = expect_ident("a variable name");
      if (!vars_here.count(v))
        throw ParseError("unexpected equation for '" + v + "'", vt.line,
                         vt.col);
      expect(Tok::Eq, "'='");
      TermRef rhs = parse_term_top();
      eqs.push_back({var_id(v), rhs});
      if (tok.kind != closer) expect(Tok::Semi, "';'");
    }
    scope_vars = std::move(outer);
    try {
      return intern_spec(std::move(eqs), label);
    } catch (const TermError& e) {
      fail(e.what());
    }
  }

  // ---- model items ----------------------------------------------------

  void parse_model_items() {
    while (tok.kind != Tok::End) {
      if (ident_is("actions")) {
        advance();
        do {
          std::string n = expect_ident("an action name");
          model.acts.intern(n);
        } while (accept(Tok::Comma));
        expect(Tok::Semi, "';'");
      } else if (ident_is("comm")) {
        advance();
        Token at = tok;
        std::string a = expect_ident("an action name");
        expect(Tok::CommOp, "'|'");
        std::string b = expect_ident("an action name");
        expect(Tok::Eq, "'='");
        std::string c = expect_ident("an action name");
        expect(Tok::Semi, "';'");
        auto la = model.acts.find(a), lb = model.acts.find(b),
             lc = model.acts.find(c);
        if (!la || !lb || !lc)
          throw ParseError("comm uses undeclared actions", at.line, at.col);
        try {
          model.acts.set_comm(*la, *lb, *lc);
        } catch (const TermError& e) {
          throw ParseError(e.what(), at.line, at.col);
        }
      } else if (ident_is("handshaking")) {
        advance();
        expect(Tok::Semi, "';'");
        model.acts.set_handshaking(true);
      } else if (ident_is("proc")) {
        advance();
        Token at = tok;
        std::string n = expect_ident("a process name");
        if (model.has_proc(n))
          throw ParseError("duplicate name '" + n + "'", at.line, at.col);
        expect(Tok::Eq, "'='");
        TermRef t = parse_term_top();
        expect(Tok::Semi, "';'");
        model.procs.push_back({n, t});
      } else if (ident_is("spec")) {
        advance();
        Token at = tok;
        std::string n = expect_ident("a specification name");
        if (model.has_proc(n))
          throw ParseError("duplicate name '" + n + "'", at.line, at.col);
        expect(Tok::LBrace, "'{'");
        if (tok.kind != Tok::Ident)
          fail("expected a variable equation");
        std::string first = tok.text;
        SpecRef spec = parse_spec_body(first, Tok::RBrace, n);
        expect(Tok::RBrace, "'}'");
        model.specs.push_back({n, spec});
      } else if (ident_is("check")) {
        Token at = tok;
        advance();
        CheckDirective d;
        d.line = at.line;
        d.rel_text = expect_ident("a relation name");
        if (!rel_from_name(d.rel_text, d.rel))
          throw ParseError("unknown relation '" + d.rel_text + "'", at.line,
                           at.col);
        d.lhs = parse_term_top();
        expect(Tok::Tilde, "'~'");
        d.rhs = parse_term_top();
        if (ident_is("expect")) {
          advance();
          std::string e = expect_ident("yes or no");
          if (e == "yes") d.expect = true;
          else if (e == "no") d.expect = false;
          else fail("expected yes or no");
        }
        expect(Tok::Semi, "';'");
        const ActionTable& a2 = model.acts;
        d.lhs_text = term_to_text(d.lhs, a2);
        d.rhs_text = term_to_text(d.rhs, a2);
        model.checks.push_back(std::move(d));
      } else {
        fail("expected a model item (actions, comm, handshaking, proc, spec, check)");
      }
    }
  }
};

}  // namespace

Model parse_model(const std::string& text, unsigned guard_depth) {
  Model m;
  Parser p(text, m, guard_depth);
  p.parse_model_items();
  for (const auto& [name, spec] : m.specs)
    if (!check_guarded(spec, guard_depth))
      throw TermError("specification '" + name +
                      "' is not syntactically guarded at depth " +
                      std::to_string(guard_depth));
  for (const auto& [name, t] : m.procs)
    if (!check_guarded_term(t, guard_depth))
      throw TermError("process '" + name +
                      "' uses a specification that is not syntactically "
                      "guarded at depth " +
                      std::to_string(guard_depth));
  for (const auto& d : m.checks) {
    if (!check_guarded_term(d.lhs, guard_depth) ||
        !check_guarded_term(d.rhs, guard_depth))
      throw TermError("check directive at line " + std::to_string(d.line) +
                      " uses an unguarded specification");
  }
  return m;
}

TermRef parse_term(const std::string& text, Model& model) {
  Parser p(text, model, 8);
  TermRef t = p.parse_term_top();
  if (p.tok.kind != Tok::End) p.fail("trailing input after term");
  return t;
}

}  // namespace drt
