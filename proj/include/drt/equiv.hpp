#pragma once

// Decision procedures for the equivalences on finite state graphs: strong
// bisimilarity, (rooted) branching bisimilarity in the two-phase view,
// rooted ts-branching bisimilarity, rooted dormancy-aware branching
// bisimilarity, and classic rooted branching bisimilarity on projected
// untimed graphs.
//
// All checkers are pairwise greatest-fixpoint eliminations. Quantification
// over time stamps is reduced to the finite prefix plus one full period of
// the synchronized sigma-lasso of a pair. Successful termination is treated
// as an ordinary state with a private termination move, so that it is
// distinguished from deadlock but can still be related to terms that reach
// it silently.

#include <string>
#include <utility>
#include <vector>

#include "drt/statespace.hpp"

namespace drt {

enum class Answer { Yes, No, Unknown };

const char* answer_name(Answer a);

struct Verdict {
  Answer answer = Answer::Unknown;
  size_t witness_pairs = 0;                          // on yes
  std::vector<std::pair<StateId, StateId>> witness;  // on yes (capped)
  std::vector<std::string> evidence;                 // on no
  std::string note;                                  // on unknown
  bool yes() const { return answer == Answer::Yes; }
};

// Optional action table: used only to render labels in evidence strings.
// sigma treated as an ordinary transition label.
Verdict strong_bisim(const TwoPhaseLts& l, StateId s1, StateId s2,
                     const ActionTable* names = nullptr);

// Greatest two-phase branching bisimulation membership. Only tau admits the
// stuttering option; sigma moves are matched by sigma moves, possibly after
// silent steps whose targets are active and related to the moving side.
Verdict branching_bisim_tp(const TwoPhaseLts& l, StateId s1, StateId s2,
                           const ActionTable* names = nullptr);

// Root condition checked over every related pair of sigma-derivatives of the
// two roots; returns unknown when the pair is branching bisimilar but some
// derivative pair fails the root condition.
Verdict rooted_branching_tp(const TwoPhaseLts& l, StateId s1, StateId s2,
                            const ActionTable* names = nullptr);

// Authoritative rooted branching check: greatest ts-branching bisimulation
// (stamped transfer conditions over sigma-lassos) plus the ts-root condition.
Verdict rooted_branching_ts(const TwoPhaseLts& l, StateId s1, StateId s2,
                            const ActionTable* names = nullptr);

// Dormancy-aware variant: silent steps to dormant targets impose no
// obligation, and idling capability is closed under silent steps.
Verdict dormancy_aware_rb(const TwoPhaseLts& l, StateId s1, StateId s2,
                          const ActionTable* names = nullptr);

// Classic branching bisimilarity with the root condition, on untimed graphs.
Verdict rooted_branching_untimed(const UntimedLts& l, StateId s1, StateId s2,
                                 const ActionTable* names = nullptr);

// Independent transfer-condition validators for yes-verdict witnesses.
bool validate_witness_strong(const TwoPhaseLts& l, const Verdict& v);
bool validate_witness_ts(const TwoPhaseLts& l, const Verdict& v,
                         bool dormancy_aware);
bool validate_witness_untimed(const UntimedLts& l, const Verdict& v);

// Disjoint union, for cross-graph comparison.
struct UnionGraph {
  TwoPhaseLts lts;
  StateId root1 = 0, root2 = 0;
};
UnionGraph make_union(const TwoPhaseLts& a, const TwoPhaseLts& b);

struct UnionUntimed {
  UntimedLts lts;
  StateId root1 = 0, root2 = 0;
};
UnionUntimed make_union(const UntimedLts& a, const UntimedLts& b);

// Relation selector used by directives and reports.
enum class Rel { Strong, BranchingTp, RootedTp, RootedTs, DormancyAware, UntimedRb };

const char* rel_name(Rel r);
bool rel_from_name(const std::string& name, Rel& out);

// Explores both terms (expanding time iteration; for UntimedRb a top-level
// time-free projection is implied) and decides the relation.
Verdict check_relation(Sos& sos, Rel rel, TermRef lhs, TermRef rhs,
                       size_t max_states = 100000);

// JSON rendering of a verdict report entry.
std::string verdict_to_json(const std::string& relation, const Verdict& v);

}  // namespace drt
