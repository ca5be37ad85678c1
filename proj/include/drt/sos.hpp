#pragma once

// Two-phase structural operational semantics as executable successor
// functions, the one-time-slice shift rewrite, and the derived time-stamped
// view. Time-free projection is supported as an ordinary operator through
// its saturation rules, so projected terms can occur anywhere in a model.

#include <optional>
#include <unordered_map>
#include <vector>

#include "drt/term.hpp"

namespace drt {

// An action transition in the current time slice. target == nullptr encodes
// successful termination.
struct Step {
  Label label;
  TermRef target;
  bool operator==(const Step& o) const {
    return label == o.label && target == o.target;
  }
  bool operator<(const Step& o) const {
    if (label != o.label) return label < o.label;
    if (target == o.target) return false;
    if (target == nullptr) return true;
    if (o.target == nullptr) return false;
    return term_cmp(target, o.target) < 0;
  }
};

struct StampedStep {
  Label label;
  uint32_t stamp;
  TermRef target;  // nullptr = termination
};

struct StampedResult {
  std::vector<StampedStep> steps;
  bool cycle_open = false;  // bound reached while idling is still possible
};

// One analysis context. Memo tables are confined to the instance; concurrent
// use of distinct instances is safe, a single instance must observe results
// identical to sequential calls (guarantee: instances are not shared).
class Sos {
 public:
  explicit Sos(const ActionTable& acts) : acts_(acts) {}

  const ActionTable& actions() const { return acts_; }

  // Current-time-slice transitions of Table 5, as a sorted set.
  const std::vector<Step>& action_steps(TermRef t);

  // The unique sigma-successor, or nullopt when the term cannot idle.
  std::optional<TermRef> sigma_step(TermRef t);

  bool can_idle(TermRef t);

  // <X|E> one-level unfolding <t|E>, memoized.
  TermRef unfold(TermRef rec);

  // DRSH1-DRSH4 oriented left-to-right, with delta . x collapsed and
  // recursion constants unfolded once as needed.
  TermRef shift_term(TermRef t);

  // Derived time-stamped transitions up to the stamp bound.
  StampedResult stamped_steps(TermRef t, uint32_t bound);

  // True iff the sigma^n-derivative of t exists (n = 0 always).
  bool idling(TermRef t, uint32_t n);

 private:
  const ActionTable& acts_;
  std::unordered_map<TermRef, std::vector<Step>> memo_steps_;
  std::unordered_map<TermRef, std::optional<TermRef>> memo_sigma_;
  std::unordered_map<TermRef, TermRef> memo_unfold_;
  std::unordered_map<TermRef, TermRef> memo_shift_;
  int depth_ = 0;

  struct DepthGuard;
  std::vector<Step> compute_steps(TermRef t);
  std::optional<TermRef> compute_sigma(TermRef t);
};

}  // namespace drt
