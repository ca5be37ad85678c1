#pragma once

// Abstract syntax, canonical forms, guardedness checking, substitution and
// recursion utilities for process terms with discrete relative timing.
//
// Terms are immutable, hash-consed values: structural equality is pointer
// equality after construction through the factory functions below. All
// operations here are pure.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace drt {

// Transition labels. 0 and 1 are the silent step and deadlock pseudo-actions,
// observable actions get ids >= 2.
using Label = int32_t;
constexpr Label kTau = 0;
constexpr Label kDelta = 1;

inline bool is_observable(Label l) { return l >= 2; }

class TermError : public std::runtime_error {
 public:
  explicit TermError(const std::string& what) : std::runtime_error(what) {}
};

// Finite action alphabet plus the partial synchronous communication function
// gamma restricted to observable actions. gamma(tau,.) and gamma(delta,.) are
// implicitly deadlock and never stored.
class ActionTable {
 public:
  ActionTable();

  Label intern(const std::string& name);            // declare/lookup observable
  std::optional<Label> find(const std::string& name) const;
  const std::string& name(Label l) const;
  size_t action_count() const { return names_.size() - 2; }
  std::vector<Label> actions() const;               // observables, sorted

  void set_comm(Label a, Label b, Label c);         // gamma(a,b) = gamma(b,a) = c
  std::optional<Label> comm(Label a, Label b) const;
  void set_handshaking(bool on) { handshaking_ = on; }
  bool handshaking() const { return handshaking_; }
  // True iff gamma(gamma(a,b),c) is undefined for all observables.
  bool comm_is_handshaking() const;

 private:
  std::vector<std::string> names_;                  // [0]="tau", [1]="delta"
  std::map<std::string, Label> ids_;
  std::map<std::pair<Label, Label>, Label> comm_;   // key sorted
  bool handshaking_ = false;
};

enum class Kind : uint8_t {
  Act,        // undelayable action constant, label in Act ∪ {tau, delta}
  Alt,        // x + y
  Seq,        // x . y
  Delay,      // sigma(x), one-time-slice delay
  Par,        // x || y
  LeftMerge,  // x |_ y
  CommMerge,  // x | y
  Encap,      // encap(H, x)
  Abstr,      // hide(I, x)
  Timeout,    // to(x), current-time-slice time-out
  Shift,      // one-time-slice shift (auxiliary operator)
  TimeFree,   // tf(x), time-free projection
  TimeIter,   // sigma*n(x), time iteration (derived form)
  Var,        // recursion variable
  Rec,        // <X | E>, recursion constant
};

struct RecSpec;
struct Term;
using TermRef = const Term*;

// Variable names are interned process-wide.
int var_id(const std::string& name);
const std::string& var_name(int id);

struct RecEq {
  int var;
  TermRef rhs;
};

// A named guarded recursive specification. Right-hand sides may only use the
// specification's own variables; closedness is enforced at construction.
// Two recursion constants are identified when their specifications are equal
// after variable renaming apart (sig) and they denote corresponding
// variables (canon index).
struct RecSpec {
  std::vector<RecEq> eqs;   // insertion order, vars pairwise distinct
  std::string label;        // optional display name
  std::string sig;          // renaming-invariant signature, set by intern_spec
  std::map<int, int> canon; // variable -> canonical index
  int id = -1;              // intern index

  TermRef rhs_of(int var) const;
  bool has_var(int var) const;
  int canon_of(int var) const;
};

using SpecRef = const RecSpec*;

struct Term {
  Kind kind;
  Label act = -1;                 // Act
  uint32_t nat = 0;               // TimeIter exponent
  std::vector<Label> set;         // Encap/Abstr action set, sorted unique
  std::vector<TermRef> kids;
  int var = -1;                   // Var, Rec
  SpecRef spec = nullptr;         // Rec
  size_t hash = 0;
  uint64_t uid = 0;               // intern sequence number

  bool is(Kind k) const { return kind == k; }
};

// Factories (interning constructors).
TermRef mk_act(Label a);
TermRef mk_alt(TermRef l, TermRef r);
TermRef mk_alt(const std::vector<TermRef>& summands);  // delta for empty
TermRef mk_seq(TermRef l, TermRef r);
TermRef mk_delay(TermRef x);
TermRef mk_delay_n(uint32_t n, TermRef x);
TermRef mk_par(TermRef l, TermRef r);
TermRef mk_left_merge(TermRef l, TermRef r);
TermRef mk_comm_merge(TermRef l, TermRef r);
TermRef mk_encap(std::vector<Label> hs, TermRef x);
TermRef mk_abstr(std::vector<Label> is, TermRef x);
TermRef mk_timeout(TermRef x);
TermRef mk_shift(TermRef x);
TermRef mk_time_free(TermRef x);
TermRef mk_time_iter(uint32_t n, TermRef x);
TermRef mk_var(int var);
TermRef mk_rec(int var, SpecRef spec);

TermRef tau_const();
TermRef delta_const();
// Delayable action sugar: <X | X = a + sigma(X)>.
TermRef delayable(Label a);

// Builds, validates and interns a specification. Throws TermError if the
// left-hand variables are not pairwise distinct or a right-hand side uses a
// variable that is not bound by the specification.
SpecRef intern_spec(std::vector<RecEq> eqs, const std::string& label);

// Fixed total structural order; used for canonical summand sorting and all
// deterministic output.
int term_cmp(TermRef a, TermRef b);
struct TermLess {
  bool operator()(TermRef a, TermRef b) const { return term_cmp(a, b) < 0; }
};

// A1/A2/A3/A6DR normal form: alternative compositions flattened, summands
// sorted, duplicates merged, deadlock summands dropped when another summand
// remains. Idempotent; the result is strongly bisimilar to the input.
TermRef canonicalize(TermRef t);

// Capture-avoiding substitution of free variables. Never descends into
// recursion constants (their specifications are closed).
TermRef substitute(TermRef t, const std::map<int, TermRef>& binding);

// Free variables of a term (variables not bound by an enclosing spec).
void free_vars(TermRef t, std::set<int>& out);
bool is_closed(TermRef t);

// Syntactic guardedness after bounded left-to-right equation unfolding.
// A variable occurrence is guarded when it sits under an observable action
// prefix a.(-), under sigma, or behind a sequential left factor whose every
// termination path performs an observable action or a sigma (so delayable
// recursion constants guard); an abstraction operator above the occurrence
// spoils the guard, and sigma guards do not count below a time-free
// projection. Sound approximation of the rewriting-based notion: false
// means "not syntactically guarded at the given depth", not a disproof.
bool check_guarded(SpecRef spec, unsigned unfold_depth = 8);
// Checks every specification reachable from t.
bool check_guarded_term(TermRef t, unsigned unfold_depth = 8);

// Replaces every time iteration sigma*n(s) by <X | X = s + sigma^n(X)>.
// Throws TermError for n = 0 (the defining equation would be unguarded).
TermRef expand_time_iteration(TermRef t);

// Nested-recursion flattening: the resulting constant's specification
// contains no recursion constant. Inner variables are renamed apart, inner
// constants replaced by their defining right-hand sides, and the inner
// equations united with the outer ones.
TermRef flatten_recursion(TermRef rec_term);

// Term rendering. `compact_rec` prints recursion constants as <X|label>
// references (used in state dumps); the full form is re-parseable.
std::string term_to_text(TermRef t, const ActionTable& acts,
                         bool compact_rec = false);

}  // namespace drt
