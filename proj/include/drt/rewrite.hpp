#pragma once

// Axiom-directed normalization: basic terms, ts-basic terms, merge
// expansion, and linearization of regular processes.

#include "drt/sos.hpp"
#include "drt/statespace.hpp"
#include "drt/term.hpp"

namespace drt {

// Recognizers for the normal-form grammars.
bool is_basic_term(TermRef t);
bool is_ts_basic_term(TermRef t);

// Elimination to a basic term by innermost left-to-right application of the
// axiom system (merge laws, distribution laws, time-out laws). The input
// must be closed and free of recursion constants, time-free projection and
// time iteration; abstraction is allowed. Guarded by a step budget.
TermRef to_basic_term(Sos& sos, TermRef t);

// Basic term to ts-basic form: sigma distributed over summands and pulled
// onto action prefixes.
TermRef to_ts_basic(TermRef t);

// One application of the merge expansion: CM1 for two components, the
// expansion equation for three or more. Requires handshaking communication.
TermRef expand_merge(const ActionTable& acts, TermRef t);

struct LinearSpec {
  SpecRef spec;
  int root_var;
};

bool is_linear_spec(SpecRef s);

// One variable per reachable state; right-hand sides are sums of a.X, a and
// sigma(X). The input must be closed, guarded, abstraction-free and regular.
LinearSpec linearize(Sos& sos, TermRef t, size_t max_states = 100000);

}  // namespace drt
