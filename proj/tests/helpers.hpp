#pragma once

// Shared fixtures: a fixed test alphabet (a..f with gamma(a,b)=c and
// gamma(d,e)=f, handshaking) and term construction from concrete syntax.

#include <string>

#include "drt/equiv.hpp"
#include "drt/model.hpp"
#include "drt/sos.hpp"
#include "drt/statespace.hpp"

inline drt::Model& test_model() {
  static drt::Model m = drt::parse_model(
      "actions a, b, c, d, e, f;\n"
      "comm a | b = c;\n"
      "comm d | e = f;\n"
      "handshaking;\n");
  return m;
}

inline const drt::ActionTable& test_acts() { return test_model().acts; }

inline drt::TermRef T(const std::string& text) {
  return drt::parse_term(text, test_model());
}

inline drt::Verdict rel_check(drt::Rel r, const std::string& lhs,
                              const std::string& rhs) {
  drt::Sos sos(test_acts());
  return drt::check_relation(sos, r, T(lhs), T(rhs), 20000);
}

inline bool rel_yes(drt::Rel r, const std::string& lhs,
                    const std::string& rhs) {
  return rel_check(r, lhs, rhs).answer == drt::Answer::Yes;
}

inline drt::Answer rel_ans(drt::Rel r, const std::string& lhs,
                           const std::string& rhs) {
  return rel_check(r, lhs, rhs).answer;
}
