#pragma once

// Finite state-graph extraction over canonical terms, sigma-lasso analysis,
// activeness, and the time-free projection transform.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "drt/sos.hpp"
#include "drt/term.hpp"

namespace drt {

using StateId = int32_t;
constexpr StateId kNoState = -1;

struct Edge {
  Label label;
  StateId target;
  bool operator<(const Edge& o) const {
    return label != o.label ? label < o.label : target < o.target;
  }
  bool operator==(const Edge& o) const {
    return label == o.label && target == o.target;
  }
};

// Two-phase state graph. States are canonical terms; the termination state
// is encoded by term == nullptr (at most one, no outgoing behavior).
struct TwoPhaseLts {
  std::vector<TermRef> states;             // [i] == nullptr for the tick state
  std::vector<std::vector<Edge>> edges;    // sorted per state
  std::vector<StateId> sigma_next;         // kNoState if the state cannot idle
  StateId root = 0;

  size_t action_edge_count() const;
  size_t sigma_edge_count() const;
  bool is_tick(StateId s) const { return states[size_t(s)] == nullptr; }
};

struct UntimedLts {
  std::vector<TermRef> states;
  std::vector<std::vector<Edge>> edges;
  StateId root = 0;
  bool is_tick(StateId s) const { return states[size_t(s)] == nullptr; }
};

class StateBoundExceeded : public TermError {
 public:
  explicit StateBoundExceeded(size_t bound)
      : TermError("state bound exceeded (" + std::to_string(bound) + ")") {}
};

// BFS closure of canonicalize(t) under action steps and the sigma successor.
// The input must be closed, guarded and free of shift / time-iteration nodes
// (desugar with expand_time_iteration first).
TwoPhaseLts explore(Sos& sos, TermRef t, size_t max_states = 100000);

// Maximal sigma-chain from s. cycle_len == 0 when the chain terminates, else
// the period of the sigma-cycle entered; path holds the states up to and
// including the first repetition point (prefix + cycle, cycle printed once).
struct Lasso {
  std::vector<StateId> path;  // path[0] == s
  uint32_t cycle_len = 0;     // 0: sigma undefined after path.back()
  size_t prefix_len() const { return path.size() - cycle_len; }

  // sigma^n-derivative of s, kNoState when it does not exist.
  StateId at(uint64_t n) const {
    if (n < path.size()) return path[size_t(n)];
    if (cycle_len == 0) return kNoState;
    uint64_t off = (n - prefix_len()) % cycle_len;
    return path[prefix_len() + size_t(off)];
  }
  bool idles(uint64_t n) const { return at(n) != kNoState; }
  bool infinite() const { return cycle_len != 0; }
  // Smallest bound such that behaviour is periodic beyond it.
  uint64_t horizon() const { return path.size(); }
};

Lasso sigma_lasso(const TwoPhaseLts& l, StateId s);

// Least fixpoint of the activeness clauses: an observable step in the current
// slice to a proper state, any current-slice step to the tick state, or a
// silent step in the current slice to an active state. Tick is not active.
std::vector<bool> activeness(const TwoPhaseLts& l);

// Time-free projection: every state's transitions are saturated over its
// sigma-derivatives, sigma edges are erased, and only action-reachable states
// are kept.
UntimedLts time_free_project(const TwoPhaseLts& l);

// Text dumps: one record per line, LF newlines.
std::string dump_lts(const TwoPhaseLts& l, const ActionTable& acts);
std::string dump_lts(const UntimedLts& l, const ActionTable& acts);

}  // namespace drt
