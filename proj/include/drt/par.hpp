#pragma once

// The PAR (positive acknowledgement with retransmission) protocol:
// parameterized construction of the sender/receiver/channel specifications,
// the reference specifications used in the analysis, and the correctness,
// performance and delivery-timing checks.

#include <set>
#include <string>
#include <vector>

#include "drt/equiv.hpp"
#include "drt/term.hpp"

namespace drt {

struct ParParams {
  int data = 1;  // |D| >= 1
  int tS = 1, tR = 1, tK = 1, tL = 1;
  int tSp = 5;  // sender time-out time t_S'
  int tRp = 1;  // receiver acknowledgement time t_R'

  int cycle() const { return tK + tR + tRp + tL; }
  bool cycle_ok() const { return tSp > cycle(); }
  void validate() const;
  std::string describe() const;
};

struct ParCase {
  ParParams p;
  ActionTable acts;

  std::vector<Label> r1, s2;                  // external actions per datum
  std::vector<Label> hide_set, encap_set;

  TermRef system;         // encap(H, S || K || L || R)
  TermRef hidden_system;  // hide(I, system)

  TermRef xspec;          // expanded specification (X of the analysis)
  TermRef hidden_xspec;   // hide(I, xspec)
  TermRef xpp;            // X'' (abstraction without the new axiom)
  TermRef xppp;           // X''' (abstraction with the new axiom)
  TermRef xppp_star;      // X''' in time-iteration form
  TermRef buffer;         // one-place buffer over delayable externals
};

ParCase make_par_case(const ParParams& p);

struct FunctionalResult {
  Verdict verdict;          // buffer equivalence of the projected system
  bool expected_yes;        // cycle_ok
  bool deadlock_reachable;  // supplementary evidence from the timed graph
  size_t system_states = 0;
  bool pass() const { return verdict.yes() == expected_yes; }
};

FunctionalResult check_functional_correctness(const ParParams& p,
                                              size_t max_states = 100000);

struct PerformanceResult {
  Verdict sys_vs_xpp_rbts;   // expected yes
  Verdict sys_vs_xppp_da;    // expected yes
  Verdict xpp_vs_xppp_rbts;  // expected no
  Verdict xpp_vs_xppp_da;    // expected yes
  size_t system_states = 0;
  bool pass() const {
    return sys_vs_xpp_rbts.yes() && sys_vs_xppp_da.yes() &&
           xpp_vs_xppp_rbts.answer == Answer::No && xpp_vs_xppp_da.yes();
  }
};

PerformanceResult check_performance_spec(const ParParams& p,
                                         size_t max_states = 100000);

// Expansion fidelity: system vs. the hidden expanded specification.
Verdict check_spec_match(const ParParams& p, size_t max_states = 100000);

struct DeliveryTiming {
  int first = -1;                 // minimum sigma count r1 -> s2
  std::set<int> delivery_delays;  // achievable counts up to the horizon
  std::set<int> post_gaps;        // s2 -> next r1 readiness
};

DeliveryTiming delivery_timing(const ParParams& p, int horizon = 20,
                               size_t max_states = 100000);

// Report JSON for the par subcommand.
std::string par_report_json(const ParParams& p, const std::string& mode,
                            const FunctionalResult* fr,
                            const PerformanceResult* pr,
                            const Verdict* match, const DeliveryTiming* dt);

}  // namespace drt
