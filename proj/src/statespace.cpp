#include "drt/statespace.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace drt {

size_t TwoPhaseLts::action_edge_count() const {
  size_t n = 0;
  for (const auto& es : edges) n += es.size();
  return n;
}

size_t TwoPhaseLts::sigma_edge_count() const {
  size_t n = 0;
  for (StateId s : sigma_next)
    if (s != kNoState) ++n;
  return n;
}

TwoPhaseLts explore(Sos& sos, TermRef t, size_t max_states) {
  TwoPhaseLts lts;
  std::unordered_map<TermRef, StateId> index;
  StateId tick = kNoState;

  auto add_state = [&](TermRef term) -> StateId {
    auto it = index.find(term);
    if (it != index.end()) return it->second;
    if (lts.states.size() >= max_states) throw StateBoundExceeded(max_states);
    StateId id = static_cast<StateId>(lts.states.size());
    lts.states.push_back(term);
    lts.edges.emplace_back();
    lts.sigma_next.push_back(kNoState);
    index.emplace(term, id);
    return id;
  };
  auto tick_state = [&]() -> StateId {
    if (tick != kNoState) return tick;
    if (lts.states.size() >= max_states) throw StateBoundExceeded(max_states);
    tick = static_cast<StateId>(lts.states.size());
    lts.states.push_back(nullptr);
    lts.edges.emplace_back();
    lts.sigma_next.push_back(kNoState);
    return tick;
  };

  TermRef root = canonicalize(t);
  lts.root = add_state(root);
  std::deque<StateId> work{lts.root};
  while (!work.empty()) {
    StateId s = work.front();
    work.pop_front();
    TermRef term = lts.states[size_t(s)];
    for (const Step& st : sos.action_steps(term)) {
      StateId tgt;
      if (st.target == nullptr) {
        tgt = tick_state();
      } else {
        TermRef c = canonicalize(st.target);
        auto it = index.find(c);
        if (it == index.end()) {
          tgt = add_state(c);
          work.push_back(tgt);
        } else {
          tgt = it->second;
        }
      }
      lts.edges[size_t(s)].push_back({st.label, tgt});
    }
    if (auto nx = sos.sigma_step(term)) {
      TermRef c = canonicalize(*nx);
      auto it = index.find(c);
      StateId tgt;
      if (it == index.end()) {
        tgt = add_state(c);
        work.push_back(tgt);
      } else {
        tgt = it->second;
      }
      lts.sigma_next[size_t(s)] = tgt;
    }
    auto& es = lts.edges[size_t(s)];
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
  }
  return lts;
}

Lasso sigma_lasso(const TwoPhaseLts& l, StateId s) {
  Lasso out;
  std::unordered_map<StateId, size_t> pos;
  StateId cur = s;
  while (true) {
    auto it = pos.find(cur);
    if (it != pos.end()) {
      out.cycle_len = static_cast<uint32_t>(out.path.size() - it->second);
      break;
    }
    pos.emplace(cur, out.path.size());
    out.path.push_back(cur);
    StateId nx = l.sigma_next[size_t(cur)];
    if (nx == kNoState) break;
    cur = nx;
  }
  return out;
}

std::vector<bool> activeness(const TwoPhaseLts& l) {
  size_t n = l.states.size();
  std::vector<bool> active(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      if (active[s] || l.is_tick(StateId(s))) continue;
      bool a = false;
      for (const Edge& e : l.edges[s]) {
        bool to_tick = l.is_tick(e.target);
        if (is_observable(e.label) && !to_tick) a = true;
        else if (to_tick) a = true;
        else if (e.label == kTau && active[size_t(e.target)]) a = true;
        if (a) break;
      }
      if (a) {
        active[s] = true;
        changed = true;
      }
    }
  }
  return active;
}

UntimedLts time_free_project(const TwoPhaseLts& l) {
  size_t n = l.states.size();
  // Saturated edges of every state: actions of all sigma-derivatives.
  std::vector<std::vector<Edge>> sat(n);
  for (size_t s = 0; s < n; ++s) {
    Lasso ls = sigma_lasso(l, StateId(s));
    std::vector<Edge> es;
    for (StateId d : ls.path)
      for (const Edge& e : l.edges[size_t(d)]) es.push_back(e);
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    sat[s] = std::move(es);
  }
  // Keep only states reachable from the root through saturated action edges.
  std::vector<StateId> remap(n, kNoState);
  UntimedLts out;
  std::deque<StateId> work;
  auto add = [&](StateId old) -> StateId {
    if (remap[size_t(old)] != kNoState) return remap[size_t(old)];
    StateId id = static_cast<StateId>(out.states.size());
    remap[size_t(old)] = id;
    out.states.push_back(l.states[size_t(old)]);
    out.edges.emplace_back();
    work.push_back(old);
    return id;
  };
  out.root = add(l.root);
  while (!work.empty()) {
    StateId old = work.front();
    work.pop_front();
    StateId id = remap[size_t(old)];
    for (const Edge& e : sat[size_t(old)]) {
      StateId tgt = add(e.target);  // may grow out.edges
      out.edges[size_t(id)].push_back({e.label, tgt});
    }
    auto& es = out.edges[size_t(id)];
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
  }
  return out;
}

namespace {

std::string state_text(TermRef t, const ActionTable& acts) {
  return t == nullptr ? "TICK" : term_to_text(t, acts, /*compact_rec=*/true);
}

template <typename L>
void dump_states_edges(std::ostringstream& os, const L& l,
                       const ActionTable& acts) {
  for (size_t s = 0; s < l.states.size(); ++s)
    os << 's' << s << ": " << state_text(l.states[s], acts) << '\n';
  for (size_t s = 0; s < l.states.size(); ++s)
    for (const Edge& e : l.edges[s])
      os << 's' << s << " -" << acts.name(e.label) << "-> s" << e.target
         << '\n';
}

}  // namespace

std::string dump_lts(const TwoPhaseLts& l, const ActionTable& acts) {
  std::ostringstream os;
  os << "lts " << l.states.size() << ' ' << l.action_edge_count() << ' '
     << l.sigma_edge_count() << " root=" << l.root << '\n';
  dump_states_edges(os, l, acts);
  for (size_t s = 0; s < l.states.size(); ++s)
    if (l.sigma_next[s] != kNoState)
      os << 's' << s << " -SIGMA-> s" << l.sigma_next[s] << '\n';
  return os.str();
}

std::string dump_lts(const UntimedLts& l, const ActionTable& acts) {
  std::ostringstream os;
  size_t edges = 0;
  for (const auto& es : l.edges) edges += es.size();
  os << "lts " << l.states.size() << ' ' << edges << " 0 root=" << l.root
     << '\n';
  dump_states_edges(os, l, acts);
  return os.str();
}

}  // namespace drt
