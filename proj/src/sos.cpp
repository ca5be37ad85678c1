#include "drt/sos.hpp"

#include <algorithm>
#include <set>

namespace drt {

namespace {
constexpr int kMaxDepth = 2000;

void push_unique(std::vector<Step>& v, Step s) { v.push_back(s); }

void finish(std::vector<Step>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

[[noreturn]] void ill_formed(TermRef t, const char* what) {
  (void)t;
  throw TermError(std::string("ill-formed term for the operational semantics: ") +
                  what);
}
}  // namespace

struct Sos::DepthGuard {
  Sos& s;
  explicit DepthGuard(Sos& sos) : s(sos) {
    if (++s.depth_ > kMaxDepth)
      throw TermError(
          "recursion unfolding exceeded the depth bound "
          "(specification not guarded?)");
  }
  ~DepthGuard() { --s.depth_; }
};

TermRef Sos::unfold(TermRef rec) {
  auto it = memo_unfold_.find(rec);
  if (it != memo_unfold_.end()) return it->second;
  std::map<int, TermRef> binding;
  for (const auto& eq : rec->spec->eqs)
    binding.emplace(eq.var, mk_rec(eq.var, rec->spec));
  TermRef result = substitute(rec->spec->rhs_of(rec->var), binding);
  memo_unfold_.emplace(rec, result);
  return result;
}

const std::vector<Step>& Sos::action_steps(TermRef t) {
  auto it = memo_steps_.find(t);
  if (it != memo_steps_.end()) return it->second;
  DepthGuard guard(*this);
  std::vector<Step> steps = compute_steps(t);
  finish(steps);
  return memo_steps_.emplace(t, std::move(steps)).first->second;
}

std::vector<Step> Sos::compute_steps(TermRef t) {
  std::vector<Step> out;
  switch (t->kind) {
    case Kind::Act:
      if (t->act != kDelta) push_unique(out, {t->act, nullptr});
      return out;
    case Kind::Alt: {
      for (const Step& s : action_steps(t->kids[0])) push_unique(out, s);
      for (const Step& s : action_steps(t->kids[1])) push_unique(out, s);
      return out;
    }
    case Kind::Seq: {
      TermRef r = t->kids[1];
      for (const Step& s : action_steps(t->kids[0]))
        push_unique(out, {s.label, s.target ? mk_seq(s.target, r) : r});
      return out;
    }
    case Kind::Delay:
      return out;
    case Kind::Par: {
      TermRef l = t->kids[0], r = t->kids[1];
      const auto ls = action_steps(l);
      const auto rs = action_steps(r);
      for (const Step& s : ls)
        push_unique(out, {s.label, s.target ? mk_par(s.target, r) : r});
      for (const Step& s : rs)
        push_unique(out, {s.label, s.target ? mk_par(l, s.target) : l});
      for (const Step& a : ls)
        for (const Step& b : rs)
          if (auto c = acts_.comm(a.label, b.label)) {
            TermRef tgt = a.target && b.target ? mk_par(a.target, b.target)
                          : a.target           ? a.target
                          : b.target           ? b.target
                                               : nullptr;
            push_unique(out, {*c, tgt});
          }
      return out;
    }
    case Kind::LeftMerge: {
      TermRef r = t->kids[1];
      for (const Step& s : action_steps(t->kids[0]))
        push_unique(out, {s.label, s.target ? mk_par(s.target, r) : r});
      return out;
    }
    case Kind::CommMerge: {
      const auto ls = action_steps(t->kids[0]);
      const auto rs = action_steps(t->kids[1]);
      for (const Step& a : ls)
        for (const Step& b : rs)
          if (auto c = acts_.comm(a.label, b.label)) {
            TermRef tgt = a.target && b.target ? mk_par(a.target, b.target)
                          : a.target           ? a.target
                          : b.target           ? b.target
                                               : nullptr;
            push_unique(out, {*c, tgt});
          }
      return out;
    }
    case Kind::Encap: {
      for (const Step& s : action_steps(t->kids[0])) {
        if (std::binary_search(t->set.begin(), t->set.end(), s.label)) continue;
        push_unique(out, {s.label,
                          s.target ? mk_encap(t->set, s.target) : nullptr});
      }
      return out;
    }
    case Kind::Abstr: {
      for (const Step& s : action_steps(t->kids[0])) {
        bool hidden = std::binary_search(t->set.begin(), t->set.end(), s.label);
        push_unique(out, {hidden ? kTau : s.label,
                          s.target ? mk_abstr(t->set, s.target) : nullptr});
      }
      return out;
    }
    case Kind::Timeout: {
      for (const Step& s : action_steps(t->kids[0])) push_unique(out, s);
      return out;
    }
    case Kind::Rec:
      return compute_steps(unfold(t));
    case Kind::TimeFree: {
      // Saturation through idling: actions of every sigma-derivative.
      std::set<TermRef> seen;
      TermRef cur = canonicalize(t->kids[0]);
      while (seen.insert(cur).second) {
        for (const Step& s : action_steps(cur))
          push_unique(out,
                      {s.label, s.target ? mk_time_free(s.target) : nullptr});
        auto next = sigma_step(cur);
        if (!next) break;
        cur = canonicalize(*next);
      }
      return out;
    }
    case Kind::Shift:
      ill_formed(t, "shift must be rewritten away before execution");
    case Kind::TimeIter:
      ill_formed(t, "time iteration must be expanded before execution");
    case Kind::Var:
      ill_formed(t, "open term");
  }
  return out;
}

std::optional<TermRef> Sos::sigma_step(TermRef t) {
  auto it = memo_sigma_.find(t);
  if (it != memo_sigma_.end()) return it->second;
  DepthGuard guard(*this);
  std::optional<TermRef> r = compute_sigma(t);
  memo_sigma_.emplace(t, r);
  return r;
}

std::optional<TermRef> Sos::compute_sigma(TermRef t) {
  switch (t->kind) {
    case Kind::Act:
      return std::nullopt;
    case Kind::Alt: {
      auto l = sigma_step(t->kids[0]);
      auto r = sigma_step(t->kids[1]);
      if (l && r) return mk_alt(*l, *r);
      if (l) return l;
      return r;
    }
    case Kind::Seq: {
      auto l = sigma_step(t->kids[0]);
      if (!l) return std::nullopt;
      return mk_seq(*l, t->kids[1]);
    }
    case Kind::Delay:
      return t->kids[0];
    case Kind::Par: {
      auto l = sigma_step(t->kids[0]);
      auto r = sigma_step(t->kids[1]);
      if (l && r) return mk_par(*l, *r);
      return std::nullopt;
    }
    case Kind::LeftMerge: {
      auto l = sigma_step(t->kids[0]);
      auto r = sigma_step(t->kids[1]);
      if (l && r) return mk_left_merge(*l, *r);
      return std::nullopt;
    }
    case Kind::CommMerge: {
      auto l = sigma_step(t->kids[0]);
      auto r = sigma_step(t->kids[1]);
      if (l && r) return mk_comm_merge(*l, *r);
      return std::nullopt;
    }
    case Kind::Encap: {
      auto x = sigma_step(t->kids[0]);
      if (!x) return std::nullopt;
      return mk_encap(t->set, *x);
    }
    case Kind::Abstr: {
      auto x = sigma_step(t->kids[0]);
      if (!x) return std::nullopt;
      return mk_abstr(t->set, *x);
    }
    case Kind::Timeout:
      return std::nullopt;
    case Kind::Rec:
      return compute_sigma(unfold(t));
    case Kind::TimeFree:
      return t;  // a time-free process idles to itself
    case Kind::Shift:
      ill_formed(t, "shift must be rewritten away before execution");
    case Kind::TimeIter:
      ill_formed(t, "time iteration must be expanded before execution");
    case Kind::Var:
      ill_formed(t, "open term");
  }
  return std::nullopt;
}

bool Sos::can_idle(TermRef t) { return sigma_step(t).has_value(); }

TermRef Sos::shift_term(TermRef t) {
  auto it = memo_shift_.find(t);
  if (it != memo_shift_.end()) return it->second;
  DepthGuard guard(*this);
  TermRef r = nullptr;
  switch (t->kind) {
    case Kind::Act:
      r = delta_const();
      break;
    case Kind::Alt:
      r = mk_alt(shift_term(t->kids[0]), shift_term(t->kids[1]));
      break;
    case Kind::Seq: {
      TermRef l = shift_term(t->kids[0]);
      r = l == delta_const() ? delta_const() : mk_seq(l, t->kids[1]);
      break;
    }
    case Kind::Delay:
      r = t->kids[0];
      break;
    case Kind::Timeout:
      r = delta_const();
      break;
    case Kind::Encap:
      r = mk_encap(t->set, shift_term(t->kids[0]));
      break;
    case Kind::Abstr:
      r = mk_abstr(t->set, shift_term(t->kids[0]));
      break;
    case Kind::Par:
    case Kind::LeftMerge:
    case Kind::CommMerge: {
      if (!can_idle(t->kids[0]) || !can_idle(t->kids[1])) {
        r = delta_const();
      } else {
        TermRef l = shift_term(t->kids[0]);
        TermRef x = shift_term(t->kids[1]);
        r = t->is(Kind::Par)         ? mk_par(l, x)
            : t->is(Kind::LeftMerge) ? mk_left_merge(l, x)
                                     : mk_comm_merge(l, x);
      }
      break;
    }
    case Kind::Rec:
      r = shift_term(unfold(t));
      break;
    case Kind::TimeFree:
      r = t;
      break;
    case Kind::Shift:
    case Kind::TimeIter:
    case Kind::Var:
      ill_formed(t, "shift expects a desugared closed term");
  }
  memo_shift_.emplace(t, r);
  return r;
}

StampedResult Sos::stamped_steps(TermRef t, uint32_t bound) {
  StampedResult res;
  TermRef cur = canonicalize(t);
  for (uint32_t n = 0;; ++n) {
    for (const Step& s : action_steps(cur))
      res.steps.push_back({s.label, n, s.target});
    if (n == bound) {
      res.cycle_open = can_idle(cur);
      break;
    }
    auto next = sigma_step(cur);
    if (!next) break;
    cur = canonicalize(*next);
  }
  return res;
}

bool Sos::idling(TermRef t, uint32_t n) {
  TermRef cur = t;
  for (uint32_t i = 0; i < n; ++i) {
    auto next = sigma_step(cur);
    if (!next) return false;
    cur = *next;
  }
  return true;
}

}  // namespace drt
