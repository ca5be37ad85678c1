#include "drt/rewrite.hpp"

#include <algorithm>

namespace drt {

namespace {

bool is_action(TermRef t) { return t->is(Kind::Act); }

}  // namespace

bool is_basic_term(TermRef t) {
  switch (t->kind) {
    case Kind::Act:
      return true;
    case Kind::Alt:
      return is_basic_term(t->kids[0]) && is_basic_term(t->kids[1]);
    case Kind::Seq:
      return is_action(t->kids[0]) && t->kids[0]->act != kDelta &&
             is_basic_term(t->kids[1]);
    case Kind::Delay:
      return is_basic_term(t->kids[0]);
    default:
      return false;
  }
}

namespace {
// Peels sigma^n(a) with n >= 0.
bool peel_stamped_action(TermRef t, TermRef& act) {
  while (t->is(Kind::Delay)) t = t->kids[0];
  if (!t->is(Kind::Act)) return false;
  act = t;
  return true;
}
}  // namespace

bool is_ts_basic_term(TermRef t) {
  switch (t->kind) {
    case Kind::Alt:
      return is_ts_basic_term(t->kids[0]) && is_ts_basic_term(t->kids[1]);
    case Kind::Seq: {
      TermRef act = nullptr;
      return peel_stamped_action(t->kids[0], act) && act->act != kDelta &&
             is_ts_basic_term(t->kids[1]);
    }
    case Kind::Act:
      return true;
    case Kind::Delay: {
      TermRef act = nullptr;
      return peel_stamped_action(t, act);
    }
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Elimination to basic terms

namespace {

// A basic term split into its action summands and the merged sigma summand.
struct Split {
  std::vector<std::pair<Label, TermRef>> acts;  // target nullptr = constant
  TermRef sigma = nullptr;                      // body of the sigma summand
};

class BasicRewriter {
 public:
  explicit BasicRewriter(Sos& sos)
      : sos_(sos), acts_(sos.actions()), budget_(2000000) {}

  TermRef run(TermRef t) { return canonicalize(basic(t)); }

 private:
  Sos& sos_;
  const ActionTable& acts_;
  size_t budget_;

  void spend() {
    if (budget_-- == 0)
      throw TermError("rewrite step budget exhausted (diverging rewrite?)");
  }

  Split split(TermRef b) {
    Split out;
    std::vector<TermRef> sigmas;
    std::vector<TermRef> work{b};
    while (!work.empty()) {
      TermRef t = work.back();
      work.pop_back();
      switch (t->kind) {
        case Kind::Alt:
          work.push_back(t->kids[0]);
          work.push_back(t->kids[1]);
          break;
        case Kind::Act:
          out.acts.push_back({t->act, nullptr});
          break;
        case Kind::Seq:
          out.acts.push_back({t->kids[0]->act, t->kids[1]});
          break;
        case Kind::Delay:
          sigmas.push_back(t->kids[0]);
          break;
        default:
          throw TermError("internal: split expects a basic term");
      }
    }
    if (!sigmas.empty()) out.sigma = mk_alt(sigmas);  // DRT1
    return out;
  }

  TermRef assemble(const Split& s) {
    std::vector<TermRef> summands;
    for (const auto& [a, cont] : s.acts)
      summands.push_back(cont ? (a == kDelta ? delta_const()
                                             : mk_seq(mk_act(a), cont))
                              : mk_act(a));
    if (s.sigma) summands.push_back(mk_delay(s.sigma));
    return canonicalize(mk_alt(summands));
  }

  // (sum) . r distributed by A4/A5/A7DR/DRT2.
  TermRef seq_basic(TermRef l, TermRef r) {
    spend();
    Split s = split(l);
    Split out;
    for (const auto& [a, cont] : s.acts) {
      if (a == kDelta) {
        out.acts.push_back({kDelta, nullptr});
      } else if (cont) {
        out.acts.push_back({a, seq_basic(cont, r)});
      } else {
        out.acts.push_back({a, r});
      }
    }
    if (s.sigma) out.sigma = seq_basic(s.sigma, r);
    return assemble(out);
  }

  TermRef left_merge_basic(TermRef l, TermRef r) {
    spend();
    Split ls = split(l);
    Split rs = split(r);
    Split out;
    for (const auto& [a, cont] : ls.acts) {
      if (a == kDelta)
        out.acts.push_back({kDelta, nullptr});
      else
        out.acts.push_back({a, cont ? par_basic(cont, r) : r});
    }
    // sigma(x) |_ (timeout part + sigma part): DRCM1 / DRCM2
    if (ls.sigma && rs.sigma)
      out.sigma = left_merge_basic(ls.sigma, rs.sigma);
    return assemble(out);
  }

  TermRef comm_merge_basic(TermRef l, TermRef r) {
    spend();
    Split ls = split(l);
    Split rs = split(r);
    Split out;
    for (const auto& [a, ca] : ls.acts)
      for (const auto& [b, cb] : rs.acts) {
        auto c = acts_.comm(a, b);
        if (!c) continue;  // gamma undefined: deadlock summand, dropped
        TermRef cont = ca && cb ? par_basic(ca, cb) : ca ? ca : cb;
        out.acts.push_back({*c, cont});
      }
    if (ls.sigma && rs.sigma)
      out.sigma = comm_merge_basic(ls.sigma, rs.sigma);  // DRCM5
    return assemble(out);
  }

  TermRef par_basic(TermRef l, TermRef r) {
    spend();
    // CM1
    return canonicalize(mk_alt(
        {left_merge_basic(l, r), left_merge_basic(r, l),
         comm_merge_basic(l, r)}));
  }

  TermRef encap_basic(const std::vector<Label>& hs, TermRef b) {
    spend();
    Split s = split(b);
    Split out;
    for (const auto& [a, cont] : s.acts) {
      if (std::binary_search(hs.begin(), hs.end(), a)) continue;  // D2DR
      out.acts.push_back({a, cont ? encap_basic(hs, cont) : nullptr});
    }
    if (s.sigma) out.sigma = encap_basic(hs, s.sigma);  // DRD
    return assemble(out);
  }

  TermRef abstr_basic(const std::vector<Label>& is, TermRef b) {
    spend();
    Split s = split(b);
    Split out;
    for (const auto& [a, cont] : s.acts) {
      Label a2 = std::binary_search(is.begin(), is.end(), a) ? kTau : a;
      out.acts.push_back({a2, cont ? abstr_basic(is, cont) : nullptr});
    }
    if (s.sigma) out.sigma = abstr_basic(is, s.sigma);  // DRTI
    return assemble(out);
  }

  TermRef timeout_basic(TermRef b) {
    spend();
    Split s = split(b);
    s.sigma = nullptr;  // DRTO4
    return assemble(s);
  }

  TermRef basic(TermRef t) {
    spend();
    switch (t->kind) {
      case Kind::Act:
        return t;
      case Kind::Alt:
        return canonicalize(mk_alt(basic(t->kids[0]), basic(t->kids[1])));
      case Kind::Seq:
        return seq_basic(basic(t->kids[0]), basic(t->kids[1]));
      case Kind::Delay:
        return mk_delay(basic(t->kids[0]));
      case Kind::Par:
        return par_basic(basic(t->kids[0]), basic(t->kids[1]));
      case Kind::LeftMerge:
        return left_merge_basic(basic(t->kids[0]), basic(t->kids[1]));
      case Kind::CommMerge:
        return comm_merge_basic(basic(t->kids[0]), basic(t->kids[1]));
      case Kind::Encap:
        return encap_basic(t->set, basic(t->kids[0]));
      case Kind::Abstr:
        return abstr_basic(t->set, basic(t->kids[0]));
      case Kind::Timeout:
        return timeout_basic(basic(t->kids[0]));
      case Kind::Shift:
        return basic(sos_.shift_term(basic(t->kids[0])));
      case Kind::Rec:
        throw TermError("not eliminable: recursion constant present");
      case Kind::TimeFree:
        throw TermError("not eliminable: time-free projection present");
      case Kind::TimeIter:
        throw TermError("not eliminable: time iteration present (desugar first)");
      case Kind::Var:
        throw TermError("not eliminable: open term");
    }
    return t;
  }
};

}  // namespace

TermRef to_basic_term(Sos& sos, TermRef t) {
  BasicRewriter rw(sos);
  TermRef b = rw.run(t);
  if (!is_basic_term(b))
    throw TermError("internal: elimination did not reach a basic term");
  return b;
}

// ---------------------------------------------------------------------------
// ts-basic form

namespace {

// sigma applied to a ts-basic term: DRT1 right-to-left over the summands,
// then DRT2 right-to-left onto the stamped action prefix.
TermRef delay_ts(TermRef t) {
  if (t->is(Kind::Alt))
    return mk_alt(delay_ts(t->kids[0]), delay_ts(t->kids[1]));
  if (t->is(Kind::Seq)) return mk_seq(mk_delay(t->kids[0]), t->kids[1]);
  return mk_delay(t);
}

TermRef ts_of_basic(TermRef t) {
  switch (t->kind) {
    case Kind::Act:
      return t;
    case Kind::Alt:
      return mk_alt(ts_of_basic(t->kids[0]), ts_of_basic(t->kids[1]));
    case Kind::Seq:
      return mk_seq(t->kids[0], ts_of_basic(t->kids[1]));
    case Kind::Delay:
      return delay_ts(ts_of_basic(t->kids[0]));
    default:
      throw TermError("to_ts_basic expects a basic term");
  }
}

}  // namespace

TermRef to_ts_basic(TermRef t) {
  if (!is_basic_term(t)) throw TermError("to_ts_basic expects a basic term");
  TermRef r = canonicalize(ts_of_basic(t));
  if (!is_ts_basic_term(r))
    throw TermError("internal: ts-basic normalization failed");
  return r;
}

// ---------------------------------------------------------------------------
// Merge expansion

namespace {
void flatten_par(TermRef t, std::vector<TermRef>& out) {
  if (t->is(Kind::Par)) {
    flatten_par(t->kids[0], out);
    flatten_par(t->kids[1], out);
  } else {
    out.push_back(t);
  }
}

TermRef par_of(const std::vector<TermRef>& xs) {
  TermRef acc = xs.back();
  for (size_t i = xs.size() - 1; i-- > 0;) acc = mk_par(xs[i], acc);
  return acc;
}
}  // namespace

TermRef expand_merge(const ActionTable& acts, TermRef t) {
  std::vector<TermRef> xs;
  flatten_par(t, xs);
  if (xs.size() < 2) return t;
  if (!acts.comm_is_handshaking())
    throw TermError("merge expansion requires handshaking communication");
  if (xs.size() == 2)
    return mk_alt({mk_left_merge(xs[0], xs[1]), mk_left_merge(xs[1], xs[0]),
                   mk_comm_merge(xs[0], xs[1])});
  std::vector<TermRef> summands;
  for (size_t i = 0; i < xs.size(); ++i) {
    std::vector<TermRef> rest;
    for (size_t j = 0; j < xs.size(); ++j)
      if (j != i) rest.push_back(xs[j]);
    summands.push_back(mk_left_merge(xs[i], par_of(rest)));
  }
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j) {
      std::vector<TermRef> rest;
      for (size_t k = 0; k < xs.size(); ++k)
        if (k != i && k != j) rest.push_back(xs[k]);
      summands.push_back(
          mk_left_merge(mk_comm_merge(xs[i], xs[j]), par_of(rest)));
    }
  return mk_alt(summands);
}

// ---------------------------------------------------------------------------
// Linearization

namespace {
bool contains_abstraction(TermRef t) {
  if (t->is(Kind::Abstr)) return true;
  for (TermRef k : t->kids)
    if (contains_abstraction(k)) return true;
  if (t->is(Kind::Rec))
    for (const auto& eq : t->spec->eqs)
      if (contains_abstraction(eq.rhs)) return true;
  return false;
}
}  // namespace

bool is_linear_spec(SpecRef s) {
  for (const auto& eq : s->eqs) {
    std::vector<TermRef> work{eq.rhs};
    while (!work.empty()) {
      TermRef t = work.back();
      work.pop_back();
      switch (t->kind) {
        case Kind::Alt:
          work.push_back(t->kids[0]);
          work.push_back(t->kids[1]);
          break;
        case Kind::Act:
          break;
        case Kind::Seq:
          if (!(t->kids[0]->is(Kind::Act) && t->kids[0]->act != kDelta &&
                t->kids[1]->is(Kind::Var)))
            return false;
          break;
        case Kind::Delay:
          if (!t->kids[0]->is(Kind::Var)) return false;
          break;
        default:
          return false;
      }
    }
  }
  return true;
}

LinearSpec linearize(Sos& sos, TermRef t, size_t max_states) {
  if (contains_abstraction(t))
    throw TermError("linearize: abstraction operators are not allowed");
  TermRef d = expand_time_iteration(t);
  if (!check_guarded_term(d))
    throw TermError("linearize: term is not syntactically guarded");
  TwoPhaseLts l = explore(sos, d, max_states);
  std::vector<int> var_of(l.states.size(), -1);
  int counter = 0;
  for (size_t s = 0; s < l.states.size(); ++s)
    if (!l.is_tick(StateId(s)))
      var_of[s] = var_id("X" + std::to_string(counter++));
  std::vector<RecEq> eqs;
  for (size_t s = 0; s < l.states.size(); ++s) {
    if (l.is_tick(StateId(s))) continue;
    std::vector<TermRef> summands;
    for (const Edge& e : l.edges[s])
      summands.push_back(l.is_tick(e.target)
                             ? mk_act(e.label)
                             : mk_seq(mk_act(e.label),
                                      mk_var(var_of[size_t(e.target)])));
    if (l.sigma_next[s] != kNoState)
      summands.push_back(mk_delay(mk_var(var_of[size_t(l.sigma_next[s])])));
    eqs.push_back({var_of[s], mk_alt(summands)});
  }
  SpecRef spec = intern_spec(std::move(eqs), "");
  return {spec, var_of[size_t(l.root)]};
}

}  // namespace drt
