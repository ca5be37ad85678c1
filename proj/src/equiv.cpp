#include "drt/equiv.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace drt {

const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    default: return "unknown";
  }
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::Strong: return "strong";
    case Rel::BranchingTp: return "b";
    case Rel::RootedTp: return "rb";
    case Rel::RootedTs: return "rb-ts";
    case Rel::DormancyAware: return "da-rb";
    case Rel::UntimedRb: return "untimed-rb";
  }
  return "?";
}

bool rel_from_name(const std::string& name, Rel& out) {
  if (name == "strong") out = Rel::Strong;
  else if (name == "b") out = Rel::BranchingTp;
  else if (name == "rb") out = Rel::RootedTp;
  else if (name == "rb-ts") out = Rel::RootedTs;
  else if (name == "da-rb") out = Rel::DormancyAware;
  else if (name == "untimed-rb") out = Rel::UntimedRb;
  else return false;
  return true;
}

namespace {

// Private labels used only inside the checkers.
constexpr Label kTick = -7;   // successful-termination move of the tick state
constexpr Label kSigma = -8;  // sigma as an ordinary label (strong bisim)

std::string label_text(Label l, const ActionTable* names = nullptr) {
  if (l == kTick) return "TICK";
  if (l == kSigma) return "SIGMA";
  if (l == kTau) return "tau";
  if (l == kDelta) return "delta";
  if (names) return names->name(l);
  return "a" + std::to_string(l);
}

// Symmetric boolean relation over state ids.
class RelMatrix {
 public:
  void init(size_t n) {
    n_ = n;
    bits_.assign((n * n + 63) / 64, 0);
  }
  bool get(StateId a, StateId b) const {
    size_t i = index(a, b);
    return (bits_[i >> 6] >> (i & 63)) & 1;
  }
  void set(StateId a, StateId b) {
    size_t i = index(a, b);
    bits_[i >> 6] |= uint64_t(1) << (i & 63);
  }
  void clear(StateId a, StateId b) {
    size_t i = index(a, b);
    bits_[i >> 6] &= ~(uint64_t(1) << (i & 63));
  }

 private:
  size_t index(StateId a, StateId b) const {
    size_t i = static_cast<size_t>(a), j = static_cast<size_t>(b);
    if (i > j) std::swap(i, j);
    return i * n_ + j;
  }
  size_t n_ = 0;
  std::vector<uint64_t> bits_;
};

TwoPhaseLts with_tick_moves(const TwoPhaseLts& l) {
  TwoPhaseLts out = l;
  for (size_t s = 0; s < out.states.size(); ++s)
    if (out.is_tick(StateId(s)))
      out.edges[s].push_back({kTick, StateId(s)});
  return out;
}

UntimedLts with_tick_moves(const UntimedLts& l) {
  UntimedLts out = l;
  for (size_t s = 0; s < out.states.size(); ++s)
    if (out.is_tick(StateId(s)))
      out.edges[s].push_back({kTick, StateId(s)});
  return out;
}

uint64_t lcm_clamped(uint64_t a, uint64_t b, uint64_t cap) {
  uint64_t g = std::gcd(a, b);
  uint64_t l = a / g * b;
  return std::min(l, cap);
}

// Shared per-graph context for the timed relations.
struct TsCtx {
  TwoPhaseLts l;                 // tick moves added
  const ActionTable* names = nullptr;
  std::vector<Lasso> lassos;
  std::vector<bool> active;      // activeness on the original graph
  std::vector<bool> busy;        // has some current-slice transition
  bool dormancy = false;
  size_t wbits = 0, wblocks = 0;
  std::vector<uint64_t> idle;    // n * wblocks
  std::vector<Label> sig_labels; // observables occurring + kTick
  std::vector<uint64_t> sig;     // n * sig_labels.size()

  const uint64_t* idle_row(StateId s) const {
    return idle.data() + size_t(s) * wblocks;
  }
  bool idle_eq(StateId a, StateId b) const {
    const uint64_t* ra = idle_row(a);
    const uint64_t* rb = idle_row(b);
    for (size_t i = 0; i < wblocks; ++i)
      if (ra[i] != rb[i]) return false;
    return true;
  }
  bool idles(StateId s, uint64_t n) const { return lassos[size_t(s)].idles(n); }
  StateId deriv(StateId s, uint64_t n) const { return lassos[size_t(s)].at(n); }

  uint64_t pair_bound(StateId a, StateId b) const {
    const Lasso& la = lassos[size_t(a)];
    const Lasso& lb = lassos[size_t(b)];
    uint64_t pre = std::max(la.prefix_len(), lb.prefix_len());
    uint64_t per = lcm_clamped(std::max<uint64_t>(1, la.cycle_len),
                               std::max<uint64_t>(1, lb.cycle_len), wbits);
    return std::min<uint64_t>(pre + per, wbits);
  }
};

void or_shifted(uint64_t* dst, const uint64_t* src, size_t blocks,
                uint64_t shift) {
  size_t word = shift / 64, bit = shift % 64;
  for (size_t i = blocks; i-- > 0;) {
    if (i < word) break;
    uint64_t v = src[i - word] << bit;
    if (bit && i - word > 0) v |= src[i - word - 1] >> (64 - bit);
    dst[i] |= v;
  }
}

bool rows_equal(const uint64_t* a, const uint64_t* b, size_t blocks) {
  for (size_t i = 0; i < blocks; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

TsCtx build_ts_ctx(const TwoPhaseLts& orig, bool dormancy) {
  TsCtx c;
  c.dormancy = dormancy;
  c.active = activeness(orig);
  c.busy.resize(orig.states.size());
  for (size_t s = 0; s < orig.states.size(); ++s)
    c.busy[s] = !orig.edges[s].empty();
  c.l = with_tick_moves(orig);
  size_t n = c.l.states.size();
  c.lassos.reserve(n);
  size_t max_lasso = 1;
  for (size_t s = 0; s < n; ++s) {
    c.lassos.push_back(sigma_lasso(c.l, StateId(s)));
    max_lasso = std::max(max_lasso, c.lassos.back().path.size());
  }
  c.wbits = std::min<size_t>(4096, std::max<size_t>(128, 4 * (max_lasso + 2)));
  c.wbits = (c.wbits + 63) / 64 * 64;
  c.wblocks = c.wbits / 64;
  if (max_lasso + 2 >= c.wbits)
    throw TermError("sigma structure too deep for the stamp horizon");

  // Idling capability rows, closed under silent steps; used as the idling
  // clause of the dormancy-aware relation only. The standard relation
  // matches sigma capability pairwise inside the fixpoint instead.
  c.idle.assign(dormancy ? n * c.wblocks : 0, 0);
  for (size_t s = 0; s < n && dormancy; ++s) {
    uint64_t* row = c.idle.data() + s * c.wblocks;
    const Lasso& ls = c.lassos[s];
    if (ls.infinite()) {
      for (size_t i = 0; i < c.wblocks; ++i) row[i] = ~uint64_t(0);
    } else {
      for (size_t p = 0; p < ls.path.size(); ++p) row[p >> 6] |= uint64_t(1) << (p & 63);
    }
  }
  bool changed = dormancy;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      const Lasso& ls = c.lassos[s];
      if (ls.infinite()) continue;
      uint64_t* row = c.idle.data() + s * c.wblocks;
      std::vector<uint64_t> before(row, row + c.wblocks);
      for (size_t p = 0; p < ls.path.size(); ++p) {
        StateId d = ls.path[p];
        for (const Edge& e : c.l.edges[size_t(d)]) {
          if (e.label != kTau) continue;
          or_shifted(row, c.idle_row(e.target), c.wblocks, p);
        }
      }
      if (!rows_equal(before.data(), row, c.wblocks)) changed = true;
    }
  }

  // Stamped observable signatures (64-stamp horizon), used as a sound
  // pre-filter: related states must agree on them.
  std::map<Label, size_t> lab_idx;
  for (size_t s = 0; s < n; ++s)
    for (const Edge& e : c.l.edges[s])
      if (e.label != kTau) lab_idx.emplace(e.label, 0);
  size_t li = 0;
  for (auto& [lab, idx] : lab_idx) {
    idx = li++;
    c.sig_labels.push_back(lab);
  }
  size_t nl = c.sig_labels.size();
  c.sig.assign(n * std::max<size_t>(nl, 1), 0);
  auto positions = [&](const Lasso& ls) {
    // All stamp positions < 64, with cycle repetition.
    std::vector<std::pair<uint64_t, StateId>> out;
    for (size_t p = 0; p < ls.path.size() && p < 64; ++p)
      out.push_back({p, ls.path[p]});
    if (ls.infinite()) {
      for (uint64_t p = ls.path.size(); p < 64; ++p)
        out.push_back({p, ls.at(p)});
    }
    return out;
  };
  if (nl) {
    changed = true;
    while (changed) {
      changed = false;
      for (size_t s = 0; s < n; ++s) {
        uint64_t* row = c.sig.data() + s * nl;
        std::vector<uint64_t> before(row, row + nl);
        for (auto [p, d] : positions(c.lassos[s])) {
          for (const Edge& e : c.l.edges[size_t(d)]) {
            if (e.label == kTau) {
              const uint64_t* src = c.sig.data() + size_t(e.target) * nl;
              for (size_t k = 0; k < nl; ++k) row[k] |= src[k] << p;
            } else {
              row[lab_idx.at(e.label)] |= uint64_t(1) << p;
            }
          }
        }
        if (!rows_equal(before.data(), row, nl)) changed = true;
      }
    }
  }
  return c;
}

// Response search: a raw silent-step path from `to`, consuming stamps, then
// an `lab`-move at total stamp n whose target is related to final_tgt.
// Intermediate silent targets carry the shifted relation obligation (skipped
// for dormant targets in the dormancy-aware relation).
bool ts_match_path(const TsCtx& c, const RelMatrix& R, StateId from,
                   StateId to, Label lab, uint64_t n, StateId final_tgt) {
  std::unordered_set<uint64_t> seen;
  std::vector<std::pair<StateId, uint64_t>> stack{{to, 0}};
  while (!stack.empty()) {
    auto [u, consumed] = stack.back();
    stack.pop_back();
    if (!seen.insert(uint64_t(u) * (c.wbits + 1) + consumed).second) continue;
    const Lasso& lu = c.lassos[size_t(u)];
    for (uint64_t q = 0; consumed + q <= n; ++q) {
      StateId d = lu.at(q);
      if (d == kNoState) break;
      uint64_t total = consumed + q;
      for (const Edge& e : c.l.edges[size_t(d)]) {
        if (e.label == lab && total == n && R.get(final_tgt, e.target))
          return true;
        if (e.label == kTau && total <= n) {
          bool obliged = !c.dormancy || c.active[size_t(e.target)];
          if (obliged) {
            StateId sd = c.deriv(from, total);
            if (sd == kNoState || !R.get(sd, e.target)) continue;
          }
          stack.push_back({e.target, total});
        }
      }
      if (q >= lu.path.size() && !lu.infinite()) break;
    }
  }
  return false;
}

// One direction of the ts transfer conditions.
bool ts_match_side(const TsCtx& c, const RelMatrix& R, StateId from,
                   StateId to, std::string* why) {
  uint64_t bound = c.pair_bound(from, to);
  const Lasso& lf = c.lassos[size_t(from)];
  for (uint64_t p = 0; p < bound; ++p) {
    StateId d = lf.at(p);
    if (d == kNoState) break;
    for (const Edge& e : c.l.edges[size_t(d)]) {
      bool ok = false;
      if (e.label == kTau) {
        if (c.dormancy && !c.active[size_t(e.target)]) {
          ok = true;  // silent step to a dormant process: no obligation
        } else {
          StateId tn = c.deriv(to, p);
          if (tn != kNoState && R.get(e.target, tn)) ok = true;
        }
      }
      if (!ok) ok = ts_match_path(c, R, from, to, e.label, p, e.target);
      if (!ok) {
        if (why)
          *why = "move " + label_text(e.label, c.names) + "[" +
                 std::to_string(p) + "] of s" + std::to_string(from) +
                 " has no response from s" + std::to_string(to);
        return false;
      }
    }
  }
  return true;
}

// One sigma step of `from` answered by `to`: silent steps inside the current
// slice (targets still busy and related to `from`), then a lockstep idle
// step into related derivatives.
bool ts_match_sigma_step(const TsCtx& c, const RelMatrix& R, StateId from,
                         StateId to) {
  StateId fs = c.l.sigma_next[size_t(from)];
  if (fs == kNoState) return true;
  std::unordered_set<StateId> seen;
  std::vector<StateId> stack{to};
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    StateId us = c.l.sigma_next[size_t(u)];
    if (us != kNoState && R.get(fs, us)) return true;
    for (const Edge& e : c.l.edges[size_t(u)])
      if (e.label == kTau && c.busy[size_t(e.target)] &&
          R.get(from, e.target))
        stack.push_back(e.target);
  }
  return false;
}

bool ts_transfer(const TsCtx& c, const RelMatrix& R, StateId a, StateId b,
                 std::string* why) {
  if (c.dormancy) {
    if (!c.idle_eq(a, b)) {
      if (why)
        *why = "idling capabilities of s" + std::to_string(a) + " and s" +
               std::to_string(b) + " differ";
      return false;
    }
  } else {
    if (!ts_match_sigma_step(c, R, a, b) ||
        !ts_match_sigma_step(c, R, b, a)) {
      if (why)
        *why = "idle steps of s" + std::to_string(a) + " and s" +
               std::to_string(b) + " cannot be matched";
      return false;
    }
  }
  return ts_match_side(c, R, a, b, why) && ts_match_side(c, R, b, a, why);
}

bool ts_root_side(const TsCtx& c, const RelMatrix& R, StateId from,
                  StateId to, std::string* why) {
  uint64_t bound = c.pair_bound(from, to);
  const Lasso& lf = c.lassos[size_t(from)];
  for (uint64_t p = 0; p < bound; ++p) {
    StateId d = lf.at(p);
    if (d == kNoState) break;
    for (const Edge& e : c.l.edges[size_t(d)]) {
      bool ok = false;
      StateId td = c.deriv(to, p);
      if (td != kNoState)
        for (const Edge& f : c.l.edges[size_t(td)])
          if (f.label == e.label && R.get(e.target, f.target)) {
            ok = true;
            break;
          }
      if (!ok) {
        if (why)
          *why = "root move " + label_text(e.label, c.names) + "[" +
                 std::to_string(p) + "] of s" + std::to_string(from) +
                 " is not matched exactly by s" + std::to_string(to);
        return false;
      }
    }
  }
  return true;
}

bool ts_root(const TsCtx& c, const RelMatrix& R, StateId a, StateId b,
             std::string* why) {
  return ts_root_side(c, R, a, b, why) && ts_root_side(c, R, b, a, why);
}

// Candidate initialisation and greatest-fixpoint elimination over the
// transfer predicate. Identity pairs are kept unconditionally.
template <typename Transfer>
std::vector<std::pair<StateId, StateId>> greatest_fixpoint(
    size_t n, RelMatrix& R, const std::vector<std::string>& keys,
    Transfer&& transfer) {
  R.init(n);
  std::unordered_map<std::string, std::vector<StateId>> groups;
  for (size_t s = 0; s < n; ++s) groups[keys[s]].push_back(StateId(s));
  std::vector<std::pair<StateId, StateId>> pairs;
  for (auto& [k, members] : groups) {
    (void)k;
    for (size_t i = 0; i < members.size(); ++i)
      for (size_t j = i + 1; j < members.size(); ++j) {
        R.set(members[i], members[j]);
        pairs.push_back({members[i], members[j]});
      }
  }
  for (size_t s = 0; s < n; ++s) R.set(StateId(s), StateId(s));
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [a, b] : pairs) {
      if (!R.get(a, b)) continue;
      if (!transfer(a, b)) {
        R.clear(a, b);
        changed = true;
      }
    }
  }
  std::vector<std::pair<StateId, StateId>> witness;
  for (auto& [a, b] : pairs)
    if (R.get(a, b)) witness.push_back({a, b});
  return witness;
}

std::vector<std::string> ts_keys(const TsCtx& c) {
  size_t n = c.l.states.size();
  std::vector<std::string> keys(n);
  size_t nl = c.sig_labels.size();
  for (size_t s = 0; s < n; ++s) {
    std::string k;
    if (c.dormancy) {
      const uint64_t* row = c.idle_row(StateId(s));
      k.append(reinterpret_cast<const char*>(row), c.wblocks * 8);
    }
    if (nl)
      k.append(reinterpret_cast<const char*>(c.sig.data() + s * nl), nl * 8);
    keys[s] = std::move(k);
  }
  return keys;
}

Verdict ts_based_check(const TwoPhaseLts& orig, StateId s1, StateId s2,
                       bool dormancy, const ActionTable* names) {
  TsCtx c = build_ts_ctx(orig, dormancy);
  c.names = names;
  RelMatrix R;
  std::string why;
  auto witness = greatest_fixpoint(
      c.l.states.size(), R, ts_keys(c),
      [&](StateId a, StateId b) { return ts_transfer(c, R, a, b, nullptr); });
  Verdict v;
  if (!R.get(s1, s2)) {
    v.answer = Answer::No;
    // Recompute the blocking condition against the final relation.
    ts_transfer(c, R, s1, s2, &why);
    if (why.empty())
      why = "states eliminated from the greatest bisimulation candidates";
    v.evidence.push_back(why);
    return v;
  }
  if (!ts_root(c, R, s1, s2, &why)) {
    v.answer = Answer::No;
    v.evidence.push_back(why);
    return v;
  }
  v.answer = Answer::Yes;
  v.witness_pairs = witness.size();
  if (witness.size() <= 5000) v.witness = std::move(witness);
  return v;
}

// --------------------------------------------------------------------------
// Two-phase checkers

struct TpCtx {
  TwoPhaseLts l;  // tick moves added
  const ActionTable* names = nullptr;
  std::vector<bool> busy;
};

bool tp_match_action(const TpCtx& c, const RelMatrix& R, StateId from,
                     StateId to, Label lab, StateId final_tgt) {
  // Silent path from `to`; every path target must be related to `from`.
  std::unordered_set<StateId> seen;
  std::vector<StateId> stack{to};
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    for (const Edge& e : c.l.edges[size_t(u)]) {
      if (e.label == lab && R.get(final_tgt, e.target)) return true;
      if (e.label == kTau && R.get(from, e.target)) stack.push_back(e.target);
    }
  }
  return false;
}

bool tp_match_sigma(const TpCtx& c, const RelMatrix& R, StateId from,
                    StateId to, StateId from_sigma) {
  // Silent path whose targets still act in the current slice and are
  // related to `from`, then a lockstep sigma move.
  std::unordered_set<StateId> seen;
  std::vector<StateId> stack{to};
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    StateId us = c.l.sigma_next[size_t(u)];
    if (us != kNoState && R.get(from_sigma, us)) return true;
    for (const Edge& e : c.l.edges[size_t(u)])
      if (e.label == kTau && c.busy[size_t(e.target)] &&
          R.get(from, e.target))
        stack.push_back(e.target);
  }
  return false;
}

bool tp_match_side(const TpCtx& c, const RelMatrix& R, StateId from,
                   StateId to, std::string* why) {
  for (const Edge& e : c.l.edges[size_t(from)]) {
    bool ok = e.label == kTau && R.get(e.target, to);
    if (!ok) ok = tp_match_action(c, R, from, to, e.label, e.target);
    if (!ok) {
      if (why)
        *why = "move " + label_text(e.label, c.names) + " of s" +
               std::to_string(from) + " has no response from s" +
               std::to_string(to);
      return false;
    }
  }
  StateId fs = c.l.sigma_next[size_t(from)];
  if (fs != kNoState && !tp_match_sigma(c, R, from, to, fs)) {
    if (why)
      *why = "sigma move of s" + std::to_string(from) +
             " has no response from s" + std::to_string(to);
    return false;
  }
  return true;
}

bool tp_transfer(const TpCtx& c, const RelMatrix& R, StateId a, StateId b,
                 std::string* why) {
  return tp_match_side(c, R, a, b, why) && tp_match_side(c, R, b, a, why);
}

bool tp_root(const TpCtx& c, const RelMatrix& R, StateId a, StateId b,
             std::string* why) {
  for (int dir = 0; dir < 2; ++dir) {
    StateId x = dir ? b : a, y = dir ? a : b;
    for (const Edge& e : c.l.edges[size_t(x)]) {
      bool ok = false;
      for (const Edge& f : c.l.edges[size_t(y)])
        if (f.label == e.label && R.get(e.target, f.target)) {
          ok = true;
          break;
        }
      if (!ok) {
        if (why)
          *why = "root move " + label_text(e.label, c.names) + " of s" +
                 std::to_string(x) + " is not matched exactly by s" +
                 std::to_string(y);
        return false;
      }
    }
    StateId xs = c.l.sigma_next[size_t(x)];
    StateId ys = c.l.sigma_next[size_t(y)];
    if (xs != kNoState && (ys == kNoState || !R.get(xs, ys))) {
      if (why)
        *why = "root sigma move of s" + std::to_string(x) +
               " is not matched exactly by s" + std::to_string(y);
      return false;
    }
  }
  return true;
}

struct TpResult {
  TpCtx ctx;
  RelMatrix R;
  std::vector<std::pair<StateId, StateId>> witness;
};

TpResult tp_fixpoint(const TwoPhaseLts& orig) {
  TpResult res;
  res.ctx.busy.resize(orig.states.size());
  for (size_t s = 0; s < orig.states.size(); ++s)
    res.ctx.busy[s] = !orig.edges[s].empty();
  res.ctx.l = with_tick_moves(orig);
  TsCtx keyctx = build_ts_ctx(orig, false);
  res.witness = greatest_fixpoint(
      res.ctx.l.states.size(), res.R, ts_keys(keyctx),
      [&](StateId a, StateId b) {
        return tp_transfer(res.ctx, res.R, a, b, nullptr);
      });
  return res;
}

// --------------------------------------------------------------------------
// Untimed checker

struct UtCtx {
  UntimedLts l;  // tick moves added
  const ActionTable* names = nullptr;
};

bool ut_match_side(const UtCtx& c, const RelMatrix& R, StateId from,
                   StateId to, std::string* why) {
  for (const Edge& e : c.l.edges[size_t(from)]) {
    bool ok = e.label == kTau && R.get(e.target, to);
    if (!ok) {
      std::unordered_set<StateId> seen;
      std::vector<StateId> stack{to};
      while (!stack.empty() && !ok) {
        StateId u = stack.back();
        stack.pop_back();
        if (!seen.insert(u).second) continue;
        for (const Edge& f : c.l.edges[size_t(u)]) {
          if (f.label == e.label && R.get(e.target, f.target)) {
            ok = true;
            break;
          }
          if (f.label == kTau && R.get(from, f.target))
            stack.push_back(f.target);
        }
      }
    }
    if (!ok) {
      if (why)
        *why = "move " + label_text(e.label, c.names) + " of s" +
               std::to_string(from) + " has no response from s" +
               std::to_string(to);
      return false;
    }
  }
  return true;
}

std::vector<std::string> ut_keys(const UntimedLts& l) {
  // Reachable-through-silence observable capabilities.
  size_t n = l.states.size();
  std::vector<std::set<Label>> caps(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      size_t before = caps[s].size();
      for (const Edge& e : l.edges[s]) {
        if (e.label != kTau)
          caps[s].insert(e.label);
        else
          caps[s].insert(caps[size_t(e.target)].begin(),
                         caps[size_t(e.target)].end());
      }
      if (caps[s].size() != before) changed = true;
    }
  }
  std::vector<std::string> keys(n);
  for (size_t s = 0; s < n; ++s) {
    std::string k;
    for (Label lab : caps[s]) k += label_text(lab) + ",";
    keys[s] = std::move(k);
  }
  return keys;
}

}  // namespace

// --------------------------------------------------------------------------
// Public API

Verdict strong_bisim(const TwoPhaseLts& l, StateId s1, StateId s2,
                     const ActionTable*) {
  TwoPhaseLts aug = with_tick_moves(l);
  for (size_t s = 0; s < aug.states.size(); ++s)
    if (aug.sigma_next[s] != kNoState)
      aug.edges[s].push_back({kSigma, aug.sigma_next[s]});
  size_t n = aug.states.size();
  std::vector<std::string> keys(n);
  for (size_t s = 0; s < n; ++s) {
    std::set<Label> labs;
    for (const Edge& e : aug.edges[s]) labs.insert(e.label);
    for (Label lab : labs) keys[s] += label_text(lab) + ",";
  }
  RelMatrix R;
  auto transfer = [&](StateId a, StateId b) {
    for (int dir = 0; dir < 2; ++dir) {
      StateId x = dir ? b : a, y = dir ? a : b;
      for (const Edge& e : aug.edges[size_t(x)]) {
        bool ok = false;
        for (const Edge& f : aug.edges[size_t(y)])
          if (f.label == e.label && R.get(e.target, f.target)) {
            ok = true;
            break;
          }
        if (!ok) return false;
      }
    }
    return true;
  };
  auto witness = greatest_fixpoint(n, R, keys, transfer);
  Verdict v;
  if (R.get(s1, s2)) {
    v.answer = Answer::Yes;
    v.witness_pairs = witness.size();
    if (witness.size() <= 5000) v.witness = std::move(witness);
  } else {
    v.answer = Answer::No;
    v.evidence.push_back("states s" + std::to_string(s1) + " and s" +
                         std::to_string(s2) +
                         " are not strongly bisimilar (label/successor "
                         "mismatch)");
  }
  return v;
}

Verdict branching_bisim_tp(const TwoPhaseLts& l, StateId s1, StateId s2,
                           const ActionTable* names) {
  TpResult res = tp_fixpoint(l);
  res.ctx.names = names;
  Verdict v;
  if (res.R.get(s1, s2)) {
    v.answer = Answer::Yes;
    v.witness_pairs = res.witness.size();
    if (res.witness.size() <= 5000) v.witness = std::move(res.witness);
  } else {
    v.answer = Answer::No;
    std::string why;
    tp_transfer(res.ctx, res.R, s1, s2, &why);
    if (why.empty())
      why = "states differ on idling/observable signatures";
    v.evidence.push_back(why);
  }
  return v;
}

Verdict rooted_branching_tp(const TwoPhaseLts& l, StateId s1, StateId s2,
                            const ActionTable* names) {
  TpResult res = tp_fixpoint(l);
  res.ctx.names = names;
  Verdict v;
  if (!res.R.get(s1, s2)) {
    v.answer = Answer::No;
    std::string why;
    tp_transfer(res.ctx, res.R, s1, s2, &why);
    if (why.empty()) why = "states differ on idling/observable signatures";
    v.evidence.push_back(why);
    return v;
  }
  // The root pair itself: the root condition is monotone in R there, so the
  // greatest relation is decisive.
  {
    std::string why;
    if (!tp_root(res.ctx, res.R, s1, s2, &why)) {
      v.answer = Answer::No;
      v.evidence.push_back(why);
      return v;
    }
  }
  // Proper sigma-derivative pairs: a failure only means that this witness
  // relation does not qualify; a smaller one might avoid the pair.
  Lasso l1 = sigma_lasso(res.ctx.l, s1);
  Lasso l2 = sigma_lasso(res.ctx.l, s2);
  for (StateId u : l1.path)
    for (StateId w : l2.path) {
      if ((u == s1 && w == s2) || !res.R.get(u, w)) continue;
      std::string why;
      if (!tp_root(res.ctx, res.R, u, w, &why)) {
        v.answer = Answer::Unknown;
        v.note = "branching bisimilar, but the sigma-derivative pair (s" +
                 std::to_string(u) + ",s" + std::to_string(w) +
                 ") fails the root condition (" + why +
                 "); a smaller witness relation might avoid it";
        return v;
      }
    }
  v.answer = Answer::Yes;
  v.witness_pairs = res.witness.size();
  if (res.witness.size() <= 5000) v.witness = std::move(res.witness);
  return v;
}

Verdict rooted_branching_ts(const TwoPhaseLts& l, StateId s1, StateId s2,
                            const ActionTable* names) {
  return ts_based_check(l, s1, s2, /*dormancy=*/false, names);
}

Verdict dormancy_aware_rb(const TwoPhaseLts& l, StateId s1, StateId s2,
                          const ActionTable* names) {
  return ts_based_check(l, s1, s2, /*dormancy=*/true, names);
}

Verdict rooted_branching_untimed(const UntimedLts& l, StateId s1, StateId s2,
                                 const ActionTable* names) {
  UtCtx c{with_tick_moves(l), names};
  RelMatrix R;
  auto witness = greatest_fixpoint(
      c.l.states.size(), R, ut_keys(c.l), [&](StateId a, StateId b) {
        return ut_match_side(c, R, a, b, nullptr) &&
               ut_match_side(c, R, b, a, nullptr);
      });
  Verdict v;
  std::string why;
  if (!R.get(s1, s2)) {
    v.answer = Answer::No;
    ut_match_side(c, R, s1, s2, &why) && ut_match_side(c, R, s2, s1, &why);
    if (why.empty()) why = "observable capabilities differ";
    v.evidence.push_back(why);
    return v;
  }
  // Root condition: initial steps matched exactly. A silent self-loop only
  // adds divergence, which branching bisimilarity ignores.
  for (int dir = 0; dir < 2; ++dir) {
    StateId x = dir ? s2 : s1, y = dir ? s1 : s2;
    for (const Edge& e : c.l.edges[size_t(x)]) {
      if (e.label == kTau && e.target == x) continue;
      bool ok = false;
      for (const Edge& f : c.l.edges[size_t(y)])
        if (f.label == e.label && R.get(e.target, f.target)) {
          ok = true;
          break;
        }
      if (!ok) {
        v.answer = Answer::No;
        v.evidence.push_back("root move " + label_text(e.label, names) +
                             " of s" + std::to_string(x) +
                             " is not matched exactly by s" +
                             std::to_string(y));
        return v;
      }
    }
  }
  v.answer = Answer::Yes;
  v.witness_pairs = witness.size();
  if (witness.size() <= 5000) v.witness = std::move(witness);
  return v;
}

// --------------------------------------------------------------------------
// Witness validators (independent re-checks of the transfer conditions)

bool validate_witness_strong(const TwoPhaseLts& l, const Verdict& v) {
  if (!v.yes() || v.witness.empty()) return v.yes();
  TwoPhaseLts aug = with_tick_moves(l);
  for (size_t s = 0; s < aug.states.size(); ++s)
    if (aug.sigma_next[s] != kNoState)
      aug.edges[s].push_back({kSigma, aug.sigma_next[s]});
  std::set<std::pair<StateId, StateId>> rel(v.witness.begin(), v.witness.end());
  for (size_t s = 0; s < aug.states.size(); ++s)
    rel.insert({StateId(s), StateId(s)});
  auto related = [&](StateId a, StateId b) {
    return rel.count({a, b}) || rel.count({b, a});
  };
  for (auto [a, b] : v.witness)
    for (int dir = 0; dir < 2; ++dir) {
      StateId x = dir ? b : a, y = dir ? a : b;
      for (const Edge& e : aug.edges[size_t(x)]) {
        bool ok = false;
        for (const Edge& f : aug.edges[size_t(y)])
          if (f.label == e.label && related(e.target, f.target)) ok = true;
        if (!ok) return false;
      }
    }
  return true;
}

bool validate_witness_ts(const TwoPhaseLts& l, const Verdict& v,
                         bool dormancy_aware) {
  if (!v.yes() || v.witness.empty()) return v.yes();
  TsCtx c = build_ts_ctx(l, dormancy_aware);
  RelMatrix R;
  R.init(c.l.states.size());
  for (auto [a, b] : v.witness) R.set(a, b);
  for (size_t s = 0; s < c.l.states.size(); ++s)
    R.set(StateId(s), StateId(s));
  for (auto [a, b] : v.witness)
    if (!ts_transfer(c, R, a, b, nullptr)) return false;
  return true;
}

bool validate_witness_untimed(const UntimedLts& l, const Verdict& v) {
  if (!v.yes() || v.witness.empty()) return v.yes();
  UtCtx c{with_tick_moves(l)};
  RelMatrix R;
  R.init(c.l.states.size());
  for (auto [a, b] : v.witness) R.set(a, b);
  for (size_t s = 0; s < c.l.states.size(); ++s)
    R.set(StateId(s), StateId(s));
  for (auto [a, b] : v.witness)
    if (!ut_match_side(c, R, a, b, nullptr) ||
        !ut_match_side(c, R, b, a, nullptr))
      return false;
  return true;
}

// --------------------------------------------------------------------------
// Unions and the relation front door

UnionGraph make_union(const TwoPhaseLts& a, const TwoPhaseLts& b) {
  UnionGraph u;
  u.lts = a;
  StateId off = static_cast<StateId>(a.states.size());
  for (size_t s = 0; s < b.states.size(); ++s) {
    u.lts.states.push_back(b.states[s]);
    std::vector<Edge> es = b.edges[s];
    for (Edge& e : es) e.target += off;
    u.lts.edges.push_back(std::move(es));
    u.lts.sigma_next.push_back(
        b.sigma_next[s] == kNoState ? kNoState : b.sigma_next[s] + off);
  }
  u.root1 = a.root;
  u.root2 = b.root + off;
  return u;
}

UnionUntimed make_union(const UntimedLts& a, const UntimedLts& b) {
  UnionUntimed u;
  u.lts = a;
  StateId off = static_cast<StateId>(a.states.size());
  for (size_t s = 0; s < b.states.size(); ++s) {
    u.lts.states.push_back(b.states[s]);
    std::vector<Edge> es = b.edges[s];
    for (Edge& e : es) e.target += off;
    u.lts.edges.push_back(std::move(es));
  }
  u.root1 = a.root;
  u.root2 = b.root + off;
  return u;
}

Verdict check_relation(Sos& sos, Rel rel, TermRef lhs, TermRef rhs,
                       size_t max_states) {
  TermRef a = expand_time_iteration(lhs);
  TermRef b = expand_time_iteration(rhs);
  if (!check_guarded_term(a) || !check_guarded_term(b))
    throw TermError("term is not syntactically guarded at the default depth");
  TwoPhaseLts la = explore(sos, a, max_states);
  TwoPhaseLts lb = explore(sos, b, max_states);
  if (rel == Rel::UntimedRb) {
    UntimedLts ua = time_free_project(la);
    UntimedLts ub = time_free_project(lb);
    UnionUntimed u = make_union(ua, ub);
    return rooted_branching_untimed(u.lts, u.root1, u.root2, &sos.actions());
  }
  UnionGraph u = make_union(la, lb);
  const ActionTable* names = &sos.actions();
  switch (rel) {
    case Rel::Strong: return strong_bisim(u.lts, u.root1, u.root2, names);
    case Rel::BranchingTp:
      return branching_bisim_tp(u.lts, u.root1, u.root2, names);
    case Rel::RootedTp:
      return rooted_branching_tp(u.lts, u.root1, u.root2, names);
    case Rel::RootedTs:
      return rooted_branching_ts(u.lts, u.root1, u.root2, names);
    case Rel::DormancyAware:
      return dormancy_aware_rb(u.lts, u.root1, u.root2, names);
    default: break;
  }
  throw TermError("unhandled relation");
}

std::string verdict_to_json(const std::string& relation, const Verdict& v) {
  nlohmann::json j;
  j["relation"] = relation;
  j["answer"] = answer_name(v.answer);
  j["witness_pairs"] = v.witness_pairs;
  j["evidence"] = v.evidence;
  if (!v.note.empty()) j["note"] = v.note;
  return j.dump();
}

}  // namespace drt
