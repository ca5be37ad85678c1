#include "drt/props.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "drt/rewrite.hpp"
#include "drt/sos.hpp"
#include "drt/statespace.hpp"

namespace drt {

const ActionTable& harness_actions() {
  static ActionTable* table = [] {
    auto* t = new ActionTable();
    Label a = t->intern("a"), b = t->intern("b"), c = t->intern("c");
    Label d = t->intern("d"), e = t->intern("e"), f = t->intern("f");
    t->set_comm(a, b, c);
    t->set_comm(d, e, f);
    t->set_handshaking(true);
    return t;
  }();
  return *table;
}

namespace {

Label pick_obs(Rng& rng) {
  const auto acts = harness_actions().actions();
  return acts[size_t(rng.below(int(acts.size())))];
}

Label pick_actt(Rng& rng, bool allow_tau) {
  if (allow_tau && rng.chance(20)) return kTau;
  return pick_obs(rng);
}

// Structure generator; guarded specs are built by construction.
TermRef gen_raw(Rng& rng, int size, const GenOptions& o) {
  if (size <= 1) {
    int r = rng.below(10);
    if (r < 6) return mk_act(pick_actt(rng, o.allow_tau));
    if (r < 7) return delta_const();
    if (r < 9 && o.allow_rec) return delayable(pick_obs(rng));
    return mk_act(pick_actt(rng, o.allow_tau));
  }
  int half = size / 2;
  int cases = o.bpa_only ? 6 : 10;
  switch (rng.below(cases)) {
    case 0:
      return mk_alt(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
    case 1:
      return mk_seq(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
    case 2:
      return mk_delay_n(uint32_t(1 + rng.below(o.max_delay)),
                        gen_raw(rng, size - 1, o));
    case 3:
      return mk_timeout(gen_raw(rng, size - 1, o));
    case 4: {
      if (!o.allow_rec)
        return mk_alt(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
      // <X | X = a.X + body> or <X | X = a.X + sigma(X) + body>
      int x = var_id("G" + std::to_string(rng.next() % 1000000) + "$g");
      std::vector<TermRef> sums;
      sums.push_back(mk_seq(mk_act(pick_obs(rng)), mk_var(x)));
      if (rng.chance(50)) sums.push_back(mk_delay(mk_var(x)));
      sums.push_back(gen_raw(rng, std::min(half, 3), o));
      return mk_rec(x, intern_spec({{x, mk_alt(sums)}}, ""));
    }
    case 5:
      return mk_seq(mk_act(pick_actt(rng, o.allow_tau)),
                    gen_raw(rng, size - 1, o));
    case 6:
      return mk_par(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
    case 7: {
      if (rng.chance(50))
        return mk_left_merge(gen_raw(rng, half, o),
                             gen_raw(rng, size - half, o));
      return mk_comm_merge(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
    }
    case 8: {
      std::vector<Label> hs;
      for (Label l : harness_actions().actions())
        if (rng.chance(30)) hs.push_back(l);
      return mk_encap(std::move(hs), gen_raw(rng, size - 1, o));
    }
    default: {
      if (!o.allow_abstraction)
        return mk_alt(gen_raw(rng, half, o), gen_raw(rng, size - half, o));
      std::vector<Label> is;
      for (Label l : harness_actions().actions())
        if (rng.chance(25)) is.push_back(l);
      return mk_abstr(std::move(is), gen_raw(rng, size - 1, o));
    }
  }
}

}  // namespace

TermRef gen_closed_term(uint64_t seed, int size, const GenOptions& o) {
  Rng rng(seed * 0x51d5c4c1cf68b6c5ULL + uint64_t(size));
  for (int attempt = 0; attempt < 64; ++attempt) {
    TermRef t = gen_raw(rng, std::max(1, size), o);
    if (!is_closed(t) || !check_guarded_term(t)) continue;
    try {
      Sos sos(harness_actions());
      explore(sos, t, o.state_bound);
      return t;
    } catch (const TermError&) {
      continue;
    }
  }
  return mk_act(pick_obs(rng));
}

// ---------------------------------------------------------------------------
// Axiom suite

namespace {

struct Instance {
  TermRef lhs;
  TermRef rhs;
};

using Gen = std::function<Instance(Rng&, Sos&)>;

struct AxiomDef {
  const char* id;
  Rel rel;
  Gen gen;
};

GenOptions small_opts() {
  GenOptions o;
  o.state_bound = 2000;
  return o;
}

TermRef g(Rng& rng, int maxsize = 4) {
  return gen_closed_term(rng.next(), 1 + rng.below(maxsize), small_opts());
}

TermRef g_bpa(Rng& rng, int maxsize = 4) {
  GenOptions o = small_opts();
  o.bpa_only = true;
  return gen_closed_term(rng.next(), 1 + rng.below(maxsize), o);
}

std::vector<Label> rand_set(Rng& rng) {
  std::vector<Label> out;
  for (Label l : harness_actions().actions())
    if (rng.chance(40)) out.push_back(l);
  return out;
}

Label rand_const_label(Rng& rng) {
  int r = rng.below(8);
  if (r == 0) return kTau;
  if (r == 1) return kDelta;
  return pick_obs(rng);
}

const std::vector<AxiomDef>& axiom_defs() {
  static const std::vector<AxiomDef>* defs = [] {
    auto* v = new std::vector<AxiomDef>();
    auto add = [&](const char* id, Rel rel, Gen gen) {
      v->push_back({id, rel, std::move(gen)});
    };
    add("A1", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_alt(x, y), mk_alt(y, x)};
    });
    add("A2", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_alt(mk_alt(x, y), z), mk_alt(x, mk_alt(y, z))};
    });
    add("A3", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r);
      return Instance{mk_alt(x, x), x};
    });
    add("A4", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_seq(mk_alt(x, y), z),
                      mk_alt(mk_seq(x, z), mk_seq(y, z))};
    });
    add("A5", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_seq(mk_seq(x, y), z), mk_seq(x, mk_seq(y, z))};
    });
    add("A6DR", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r);
      return Instance{mk_alt(x, delta_const()), x};
    });
    add("A7DR", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r);
      return Instance{mk_seq(delta_const(), x), delta_const()};
    });
    add("DRT1", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_alt(mk_delay(x), mk_delay(y)),
                      mk_delay(mk_alt(x, y))};
    });
    add("DRT2", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_seq(mk_delay(x), y), mk_delay(mk_seq(x, y))};
    });
    add("D1DR", Rel::Strong, [](Rng& r, Sos&) {
      std::vector<Label> hs = rand_set(r);
      Label a = kTau;
      do { a = rand_const_label(r); } while (
          std::binary_search(hs.begin(), hs.end(), a) && a != kTau &&
          a != kDelta);
      // side condition a not in H (tau/delta are never in H)
      std::vector<Label> hs2;
      for (Label l : hs)
        if (l != a) hs2.push_back(l);
      return Instance{mk_encap(hs2, mk_act(a)), mk_act(a)};
    });
    add("D2DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = pick_obs(r);
      std::vector<Label> hs = rand_set(r);
      hs.push_back(a);
      return Instance{mk_encap(hs, mk_act(a)), delta_const()};
    });
    add("D3", Rel::Strong, [](Rng& r, Sos&) {
      auto hs = rand_set(r);
      TermRef x = g(r), y = g(r);
      return Instance{mk_encap(hs, mk_alt(x, y)),
                      mk_alt(mk_encap(hs, x), mk_encap(hs, y))};
    });
    add("D4", Rel::Strong, [](Rng& r, Sos&) {
      auto hs = rand_set(r);
      TermRef x = g(r), y = g(r);
      return Instance{mk_encap(hs, mk_seq(x, y)),
                      mk_seq(mk_encap(hs, x), mk_encap(hs, y))};
    });
    add("DRD", Rel::Strong, [](Rng& r, Sos&) {
      auto hs = rand_set(r);
      TermRef x = g(r);
      return Instance{mk_encap(hs, mk_delay(x)), mk_delay(mk_encap(hs, x))};
    });
    add("TI1DR", Rel::Strong, [](Rng& r, Sos&) {
      auto is = rand_set(r);
      Label a;
      do { a = rand_const_label(r); } while (
          std::binary_search(is.begin(), is.end(), a));
      return Instance{mk_abstr(is, mk_act(a)), mk_act(a)};
    });
    add("TI2DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = pick_obs(r);
      auto is = rand_set(r);
      is.push_back(a);
      return Instance{mk_abstr(is, mk_act(a)), tau_const()};
    });
    add("TI3", Rel::Strong, [](Rng& r, Sos&) {
      auto is = rand_set(r);
      TermRef x = g(r), y = g(r);
      return Instance{mk_abstr(is, mk_alt(x, y)),
                      mk_alt(mk_abstr(is, x), mk_abstr(is, y))};
    });
    add("TI4", Rel::Strong, [](Rng& r, Sos&) {
      auto is = rand_set(r);
      TermRef x = g(r), y = g(r);
      return Instance{mk_abstr(is, mk_seq(x, y)),
                      mk_seq(mk_abstr(is, x), mk_abstr(is, y))};
    });
    add("DRTI", Rel::Strong, [](Rng& r, Sos&) {
      auto is = rand_set(r);
      TermRef x = g(r);
      return Instance{mk_abstr(is, mk_delay(x)), mk_delay(mk_abstr(is, x))};
    });
    add("CM1", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_par(x, y),
                      mk_alt(mk_alt(mk_left_merge(x, y), mk_left_merge(y, x)),
                             mk_comm_merge(x, y))};
    });
    add("CM2DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r);
      TermRef x = g(r);
      return Instance{mk_left_merge(mk_act(a), x), mk_seq(mk_act(a), x)};
    });
    add("CM3DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r);
      TermRef x = g(r), y = g(r);
      return Instance{mk_left_merge(mk_seq(mk_act(a), x), y),
                      mk_seq(mk_act(a), mk_par(x, y))};
    });
    add("DRCM1", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_left_merge(mk_delay(x), mk_timeout(y)),
                      delta_const()};
    });
    add("DRCM2", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{
          mk_left_merge(mk_delay(x), mk_alt(mk_timeout(y), mk_delay(z))),
          mk_delay(mk_left_merge(x, z))};
    });
    add("CM4", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_left_merge(mk_alt(x, y), z),
                      mk_alt(mk_left_merge(x, z), mk_left_merge(y, z))};
    });
    add("CM5DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r), b = rand_const_label(r);
      TermRef x = g(r);
      return Instance{mk_comm_merge(mk_seq(mk_act(a), x), mk_act(b)),
                      mk_seq(mk_comm_merge(mk_act(a), mk_act(b)), x)};
    });
    add("CM6DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r), b = rand_const_label(r);
      TermRef x = g(r);
      return Instance{mk_comm_merge(mk_act(a), mk_seq(mk_act(b), x)),
                      mk_seq(mk_comm_merge(mk_act(a), mk_act(b)), x)};
    });
    add("CM7DR", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r), b = rand_const_label(r);
      TermRef x = g(r), y = g(r);
      return Instance{
          mk_comm_merge(mk_seq(mk_act(a), x), mk_seq(mk_act(b), y)),
          mk_seq(mk_comm_merge(mk_act(a), mk_act(b)), mk_par(x, y))};
    });
    add("DRCM3", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_comm_merge(mk_timeout(x), mk_delay(y)),
                      delta_const()};
    });
    add("DRCM4", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_comm_merge(mk_delay(x), mk_timeout(y)),
                      delta_const()};
    });
    add("DRCM5", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_comm_merge(mk_delay(x), mk_delay(y)),
                      mk_delay(mk_comm_merge(x, y))};
    });
    add("CM8", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_comm_merge(mk_alt(x, y), z),
                      mk_alt(mk_comm_merge(x, z), mk_comm_merge(y, z))};
    });
    add("CM9", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r), z = g(r);
      return Instance{mk_comm_merge(x, mk_alt(y, z)),
                      mk_alt(mk_comm_merge(x, y), mk_comm_merge(x, z))};
    });
    add("CFDR", Rel::Strong, [](Rng& r, Sos&) {
      // gamma(a,b) = c or gamma(d,e) = f
      const ActionTable& t = harness_actions();
      Label a = *t.find(r.chance(50) ? "a" : "d");
      Label b = *t.find(a == *t.find("a") ? "b" : "e");
      Label c = *t.comm(a, b);
      if (r.chance(50)) std::swap(a, b);
      return Instance{mk_comm_merge(mk_act(a), mk_act(b)), mk_act(c)};
    });
    add("DRTO1", Rel::Strong, [](Rng& r, Sos&) {
      Label a = rand_const_label(r);
      return Instance{mk_timeout(mk_act(a)), mk_act(a)};
    });
    add("DRTO2", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_timeout(mk_alt(x, y)),
                      mk_alt(mk_timeout(x), mk_timeout(y))};
    });
    add("DRTO3", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_timeout(mk_seq(x, y)), mk_seq(mk_timeout(x), y)};
    });
    add("DRTO4", Rel::Strong, [](Rng& r, Sos&) {
      TermRef x = g(r);
      return Instance{mk_timeout(mk_delay(x)), delta_const()};
    });
    // Silent-step axioms, checked under rooted ts-branching bisimilarity.
    add("DRB1", Rel::RootedTs, [](Rng& r, Sos&) {
      Label a = pick_actt(r, true);
      return Instance{mk_seq(mk_act(a), tau_const()), mk_act(a)};
    });
    // DRB2/DRB4 instances keep the silenced branch anchored in the current
    // time slice (a time-closed or action-guarded occurrence): with a fully
    // quiescent branch next to an idling alternative the schemas would erase
    // a silent step in front of a delay, which only the dormancy-aware
    // relation identifies.
    add("DRB2", Rel::RootedTs, [](Rng& r, Sos&) {
      Label a = pick_actt(r, true);
      TermRef x, y;
      if (r.chance(50)) {
        x = g(r);
        y = mk_timeout(g(r));
      } else {
        x = mk_seq(mk_act(pick_obs(r)), g(r));
        y = g(r);
      }
      TermRef core = mk_alt(mk_timeout(x), y);
      return Instance{
          mk_seq(mk_act(a),
                 mk_alt(mk_seq(tau_const(), core), mk_timeout(x))),
          mk_seq(mk_act(a), core)};
    });
    add("DRB3", Rel::RootedTs, [](Rng& r, Sos&) {
      Label a = pick_actt(r, true);
      TermRef x = g(r), y = g(r);
      TermRef core = mk_alt(mk_timeout(x), y);
      return Instance{
          mk_seq(mk_act(a), mk_alt(mk_seq(tau_const(), core), y)),
          mk_seq(mk_act(a), core)};
    });
    add("DRB4", Rel::RootedTs, [](Rng& r, Sos&) {
      Label a = pick_actt(r, true);
      TermRef x = r.chance(50) ? mk_timeout(g(r))
                               : mk_seq(mk_act(pick_obs(r)), g(r));
      TermRef y = g(r);
      return Instance{
          mk_seq(mk_act(a), mk_alt(mk_delay(mk_seq(tau_const(), x)),
                                   mk_timeout(y))),
          mk_seq(mk_act(a), mk_alt(mk_delay(x), mk_timeout(y)))};
    });
    // Shift axioms, via the shift rewrite.
    add("DRSH1", Rel::Strong, [](Rng& r, Sos& sos) {
      Label a = rand_const_label(r);
      return Instance{sos.shift_term(mk_act(a)), delta_const()};
    });
    add("DRSH2", Rel::Strong, [](Rng& r, Sos& sos) {
      TermRef x = g(r), y = g(r);
      return Instance{sos.shift_term(mk_alt(x, y)),
                      mk_alt(sos.shift_term(x), sos.shift_term(y))};
    });
    add("DRSH3", Rel::Strong, [](Rng& r, Sos& sos) {
      TermRef x = g(r), y = g(r);
      return Instance{sos.shift_term(mk_seq(x, y)),
                      mk_seq(sos.shift_term(x), y)};
    });
    add("DRSH4", Rel::Strong, [](Rng& r, Sos& sos) {
      TermRef x = g(r);
      return Instance{sos.shift_term(mk_delay(x)), x};
    });
    // Time-free projection axioms, compared after projection.
    add("DRTFP1", Rel::UntimedRb, [](Rng& r, Sos&) {
      Label a = rand_const_label(r);
      return Instance{mk_time_free(mk_act(a)), delayable(a)};
    });
    add("DRTFP2", Rel::UntimedRb, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_time_free(mk_alt(x, y)),
                      mk_alt(mk_time_free(x), mk_time_free(y))};
    });
    add("DRTFP3", Rel::UntimedRb, [](Rng& r, Sos&) {
      TermRef x = g(r), y = g(r);
      return Instance{mk_time_free(mk_seq(x, y)),
                      mk_seq(mk_time_free(x), mk_time_free(y))};
    });
    add("DRTFP4", Rel::UntimedRb, [](Rng& r, Sos&) {
      TermRef x = g(r);
      return Instance{mk_time_free(mk_delay(x)), mk_time_free(x)};
    });
    // The dormancy axiom, under the dormancy-aware relation.
    add("DRB5", Rel::DormancyAware, [](Rng& r, Sos&) {
      Label a = pick_actt(r, true);
      uint32_t nn = uint32_t(r.below(3));
      TermRef x = g(r), y = g(r);
      return Instance{
          mk_seq(mk_act(a),
                 mk_alt(mk_delay_n(nn, mk_seq(tau_const(), mk_delay(x))), y)),
          mk_seq(mk_act(a), mk_alt(mk_delay_n(nn, mk_delay(x)), y))};
    });
    // Recursive definition principle: a constant and its unfolding.
    add("RDP", Rel::Strong, [](Rng& r, Sos& sos) {
      TermRef rec = nullptr;
      for (int attempt = 0; attempt < 32 && !rec; ++attempt) {
        TermRef t = g(r, 5);
        rec = [&]() -> TermRef {
          // find a recursion constant inside t, else build one
          std::vector<TermRef> work{t};
          while (!work.empty()) {
            TermRef u = work.back();
            work.pop_back();
            if (u->is(Kind::Rec)) return u;
            for (TermRef k : u->kids) work.push_back(k);
          }
          return nullptr;
        }();
      }
      if (!rec) rec = delayable(pick_obs(r));
      return Instance{rec, sos.unfold(rec)};
    });
    return v;
  }();
  return *defs;
}

}  // namespace

const std::vector<std::string>& axiom_ids() {
  static const std::vector<std::string>* ids = [] {
    auto* v = new std::vector<std::string>();
    for (const auto& d : axiom_defs()) v->push_back(d.id);
    return v;
  }();
  return *ids;
}

AxiomReport check_axiom_soundness(const std::string& id, int samples,
                                  uint64_t seed) {
  const AxiomDef* def = nullptr;
  for (const auto& d : axiom_defs())
    if (id == d.id) def = &d;
  if (!def) throw TermError("unknown axiom id '" + id + "'");
  AxiomReport rep;
  rep.id = id;
  rep.relation = rel_name(def->rel);
  rep.samples = samples;
  for (int i = 0; i < samples; ++i) {
    Rng rng(seed ^ (uint64_t(i) * 0x7fb5d329728ea185ULL));
    Sos sos(harness_actions());
    Instance inst = def->gen(rng, sos);
    Verdict v;
    try {
      v = check_relation(sos, def->rel, inst.lhs, inst.rhs, 4000);
    } catch (const TermError& e) {
      v.answer = Answer::No;
      v.evidence.push_back(e.what());
    }
    if (v.yes()) {
      ++rep.passed;
    } else if (rep.failures.size() < 5) {
      rep.failures.push_back(
          "sample " + std::to_string(i) + ": " +
          term_to_text(inst.lhs, harness_actions()) + "  vs  " +
          term_to_text(inst.rhs, harness_actions()) +
          (v.evidence.empty() ? "" : " -- " + v.evidence.front()));
    }
  }
  return rep;
}

std::vector<AxiomReport> check_all_axioms(int samples, uint64_t seed) {
  std::vector<AxiomReport> out;
  for (const auto& id : axiom_ids())
    out.push_back(check_axiom_soundness(id, samples, seed));
  return out;
}

// ---------------------------------------------------------------------------
// Meta-property suites

namespace {

void run_entry(MetaReport& rep, const std::string& name, int samples,
               const std::function<bool(int, std::string&)>& body) {
  MetaEntry e;
  e.name = name;
  e.samples = samples;
  for (int i = 0; i < samples; ++i) {
    std::string why;
    bool ok = false;
    try {
      ok = body(i, why);
    } catch (const TermError& err) {
      why = err.what();
    }
    if (ok) ++e.passed;
    else if (e.failures.size() < 5)
      e.failures.push_back("sample " + std::to_string(i) +
                           (why.empty() ? "" : ": " + why));
  }
  rep.entries.push_back(std::move(e));
}

TermRef gen_for(uint64_t seed, int i, int size, bool bpa = false) {
  GenOptions o;
  o.bpa_only = bpa;
  return gen_closed_term(seed ^ (uint64_t(i) * 0x9e3779b97f4a7c15ULL), size, o);
}

}  // namespace

MetaReport check_meta_properties(int samples, uint64_t seed) {
  MetaReport rep;
  const ActionTable& acts = harness_actions();

  // Standard concurrency equations, as rooted branching equivalences.
  struct StdEq {
    const char* name;
    std::function<Instance(TermRef, TermRef, TermRef)> make;
  };
  const std::vector<StdEq> std_eqs = {
      {"par-commutative",
       [](TermRef x, TermRef y, TermRef) {
         return Instance{mk_par(x, y), mk_par(y, x)};
       }},
      {"par-associative",
       [](TermRef x, TermRef y, TermRef z) {
         return Instance{mk_par(mk_par(x, y), z), mk_par(x, mk_par(y, z))};
       }},
      {"leftmerge-staging",
       [](TermRef x, TermRef y, TermRef z) {
         return Instance{mk_left_merge(mk_left_merge(x, y), z),
                         mk_left_merge(x, mk_par(y, z))};
       }},
      {"comm-commutative",
       [](TermRef x, TermRef y, TermRef) {
         return Instance{mk_comm_merge(x, y), mk_comm_merge(y, x)};
       }},
      {"comm-associative",
       [](TermRef x, TermRef y, TermRef z) {
         return Instance{mk_comm_merge(mk_comm_merge(x, y), z),
                         mk_comm_merge(x, mk_comm_merge(y, z))};
       }},
      {"comm-leftmerge-exchange",
       [](TermRef x, TermRef y, TermRef z) {
         return Instance{mk_comm_merge(x, mk_left_merge(y, z)),
                         mk_left_merge(mk_comm_merge(x, y), z)};
       }},
  };
  for (const auto& eq : std_eqs) {
    run_entry(rep, std::string("std-concurrency: ") + eq.name, samples,
              [&](int i, std::string& why) {
                Sos sos(acts);
                TermRef x = gen_for(seed + 11, i, 3);
                TermRef y = gen_for(seed + 22, i, 3);
                TermRef z = gen_for(seed + 33, i, 3);
                Instance inst = eq.make(x, y, z);
                Verdict v =
                    check_relation(sos, Rel::RootedTs, inst.lhs, inst.rhs, 6000);
                if (!v.yes()) why = "verdict " + std::string(answer_name(v.answer));
                return v.yes();
              });
  }

  // Handshaking axiom: to(x|y|z) equals deadlock.
  run_entry(rep, "handshaking-axiom", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    TermRef x = gen_for(seed + 44, i, 3);
    TermRef y = gen_for(seed + 55, i, 3);
    TermRef z = gen_for(seed + 66, i, 3);
    TermRef lhs = mk_timeout(mk_comm_merge(mk_comm_merge(x, y), z));
    Verdict v = check_relation(sos, Rel::RootedTs, lhs, delta_const(), 6000);
    if (!v.yes()) why = "verdict " + std::string(answer_name(v.answer));
    return v.yes();
  });

  // Merge expansion for three components.
  run_entry(rep, "expansion-theorem-n3", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    TermRef x = gen_for(seed + 77, i, 3);
    TermRef y = gen_for(seed + 88, i, 3);
    TermRef z = gen_for(seed + 99, i, 3);
    TermRef t = mk_par(x, mk_par(y, z));
    TermRef e = expand_merge(acts, t);
    Verdict v = check_relation(sos, Rel::Strong, t, e, 8000);
    if (!v.yes()) why = "expansion not strongly bisimilar";
    return v.yes();
  });

  // Two-phase / time-stamped correspondence: the stamped steps enumerated on
  // the term level agree with the graph lasso view.
  run_entry(rep, "two-phase-timestamp-correspondence", samples,
            [&](int i, std::string& why) {
              Sos sos(acts);
              TermRef t = gen_for(seed + 111, i, 5);
              StampedResult sr = sos.stamped_steps(t, 12);
              TwoPhaseLts l = explore(sos, t, 4000);
              Lasso ls = sigma_lasso(l, l.root);
              std::multiset<std::pair<Label, uint32_t>> a, b;
              for (const auto& st : sr.steps) a.insert({st.label, st.stamp});
              for (uint32_t n = 0; n <= 12; ++n) {
                StateId d = ls.at(n);
                if (d == kNoState) break;
                for (const Edge& e : l.edges[size_t(d)])
                  b.insert({e.label, n});
              }
              if (a != b) {
                why = "stamped step sets differ";
                return false;
              }
              for (const auto& st : sr.steps)
                if (!sos.idling(t, st.stamp)) {
                  why = "stamp without idling";
                  return false;
                }
              return true;
            });

  // Coincidence of the two rooted branching definitions on sampled pairs.
  run_entry(rep, "rooted-branching-coincidence", samples * 5,
            [&](int i, std::string& why) {
              Sos sos(acts);
              TermRef t1 = gen_for(seed + 123, i, 4);
              TermRef t2 = i % 3 == 0 ? gen_for(seed + 123, i, 4)
                                      : gen_for(seed + 321, i, 4);
              Verdict tp = check_relation(sos, Rel::RootedTp, t1, t2, 4000);
              Verdict ts = check_relation(sos, Rel::RootedTs, t1, t2, 4000);
              if (tp.answer == Answer::Yes && ts.answer != Answer::Yes) {
                why = "tp yes but ts " + std::string(answer_name(ts.answer));
                return false;
              }
              if (tp.answer == Answer::No && ts.answer == Answer::Yes) {
                why = "tp no but ts yes";
                return false;
              }
              return true;
            });

  // Rooted branching is included in the dormancy-aware relation.
  run_entry(rep, "inclusion-rb-in-da", samples * 5,
            [&](int i, std::string& why) {
              Sos sos(acts);
              TermRef t1 = gen_for(seed + 222, i, 4);
              TermRef t2 = i % 2 ? gen_for(seed + 222, i, 4)
                                 : gen_for(seed + 333, i, 4);
              Verdict ts = check_relation(sos, Rel::RootedTs, t1, t2, 4000);
              if (!ts.yes()) return true;
              Verdict da = check_relation(sos, Rel::DormancyAware, t1, t2, 4000);
              if (!da.yes()) {
                why = "rb-ts yes but da-rb no";
                return false;
              }
              return true;
            });

  // RSP spot check: one-step-unfolded specifications have the same solution.
  run_entry(rep, "rsp-spot-check", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    TermRef t = gen_for(seed + 444, i, 5);
    std::vector<TermRef> work{t};
    TermRef rec = nullptr;
    while (!work.empty() && !rec) {
      TermRef u = work.back();
      work.pop_back();
      if (u->is(Kind::Rec)) rec = u;
      for (TermRef k : u->kids) work.push_back(k);
    }
    if (!rec) rec = delayable(*acts.find("a"));
    // Unfold every right-hand side once.
    std::map<int, TermRef> body;
    for (const auto& eq : rec->spec->eqs) body.emplace(eq.var, eq.rhs);
    std::vector<RecEq> eqs;
    for (const auto& eq : rec->spec->eqs)
      eqs.push_back({eq.var, substitute(eq.rhs, body)});
    SpecRef unfolded = intern_spec(std::move(eqs), "");
    Verdict v = check_relation(sos, Rel::RootedTs, rec,
                               mk_rec(rec->var, unfolded), 4000);
    if (!v.yes()) why = "unfolded specification not equivalent";
    return v.yes();
  });

  // Equivalence laws on sampled terms (reflexivity, symmetry, transitivity).
  run_entry(rep, "equivalence-laws", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    TermRef t1 = gen_for(seed + 555, i, 4);
    TermRef t2 = canonicalize(t1);
    TermRef t3 = gen_for(seed + 666, i, 4);
    for (Rel rel : {Rel::RootedTs, Rel::DormancyAware}) {
      if (!check_relation(sos, rel, t1, t1, 4000).yes()) {
        why = "reflexivity failed";
        return false;
      }
      Verdict v12 = check_relation(sos, rel, t1, t2, 4000);
      Verdict v21 = check_relation(sos, rel, t2, t1, 4000);
      if (v12.yes() != v21.yes()) {
        why = "symmetry failed";
        return false;
      }
      Verdict v13 = check_relation(sos, rel, t1, t3, 4000);
      Verdict v23 = check_relation(sos, rel, t2, t3, 4000);
      if (v12.yes() && v23.yes() && !v13.yes()) {
        why = "transitivity failed";
        return false;
      }
    }
    return true;
  });

  // Congruence sampling for rooted branching over the full signature.
  run_entry(rep, "congruence-rb-ts", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    Rng rng(seed + 777 + uint64_t(i));
    // A valid DRB3 instance provides the related pair.
    Label a = pick_actt(rng, true);
    TermRef x = g(rng), y = g(rng);
    TermRef core = mk_alt(mk_timeout(x), y);
    TermRef t1 = mk_seq(mk_act(a), mk_alt(mk_seq(tau_const(), core), y));
    TermRef t2 = mk_seq(mk_act(a), core);
    TermRef c = g(rng);
    std::vector<std::pair<TermRef, TermRef>> contexts = {
        {mk_alt(t1, c), mk_alt(t2, c)},
        {mk_seq(c, t1), mk_seq(c, t2)},
        {mk_seq(t1, c), mk_seq(t2, c)},
        {mk_delay(t1), mk_delay(t2)},
        {mk_timeout(t1), mk_timeout(t2)},
        {mk_par(t1, c), mk_par(t2, c)},
        {mk_left_merge(t1, c), mk_left_merge(t2, c)},
        {mk_comm_merge(c, t1), mk_comm_merge(c, t2)},
        {mk_encap({*acts.find("a")}, t1), mk_encap({*acts.find("a")}, t2)},
    };
    Verdict base = check_relation(sos, Rel::RootedTs, t1, t2, 4000);
    if (!base.yes()) {
      why = "base DRB3 pair not rb-ts equivalent";
      return false;
    }
    auto& ctx = contexts[size_t(rng.below(int(contexts.size())))];
    Verdict v = check_relation(sos, Rel::RootedTs, ctx.first, ctx.second, 8000);
    if (!v.yes()) {
      why = "context broke rb-ts equivalence";
      return false;
    }
    return true;
  });

  // Congruence sampling for the dormancy-aware relation over the timed BPA
  // operators.
  run_entry(rep, "congruence-da-bpa", samples, [&](int i, std::string& why) {
    Sos sos(acts);
    Rng rng(seed + 888 + uint64_t(i));
    Label a = pick_actt(rng, true);
    uint32_t nn = uint32_t(rng.below(2));
    TermRef x = g_bpa(rng), y = g_bpa(rng);
    TermRef t1 = mk_seq(
        mk_act(a), mk_alt(mk_delay_n(nn, mk_seq(tau_const(), mk_delay(x))), y));
    TermRef t2 = mk_seq(mk_act(a), mk_alt(mk_delay_n(nn, mk_delay(x)), y));
    TermRef c = g_bpa(rng);
    std::vector<std::pair<TermRef, TermRef>> contexts = {
        {mk_alt(t1, c), mk_alt(t2, c)},
        {mk_seq(c, t1), mk_seq(c, t2)},
        {mk_seq(t1, c), mk_seq(t2, c)},
        {mk_delay(t1), mk_delay(t2)},
        {mk_timeout(t1), mk_timeout(t2)},
    };
    Verdict base = check_relation(sos, Rel::DormancyAware, t1, t2, 4000);
    if (!base.yes()) {
      why = "base DRB5 pair not da-rb equivalent";
      return false;
    }
    auto& ctx = contexts[size_t(rng.below(int(contexts.size())))];
    Verdict v =
        check_relation(sos, Rel::DormancyAware, ctx.first, ctx.second, 8000);
    if (!v.yes()) {
      why = "context broke da-rb equivalence";
      return false;
    }
    return true;
  });

  // On tau-free, sigma-free terms the two-phase branching check coincides
  // with strong bisimilarity.
  run_entry(rep, "branching-equals-strong-untimed-taufree", samples,
            [&](int i, std::string& why) {
              GenOptions o;
              o.allow_tau = false;
              o.allow_abstraction = false;
              o.max_delay = 0;
              o.allow_rec = false;
              Sos sos(acts);
              TermRef t1 = gen_closed_term(seed + 999 + uint64_t(i), 4, o);
              TermRef t2 = gen_closed_term(seed + 1999 + uint64_t(i), 4, o);
              Verdict s = check_relation(sos, Rel::Strong, t1, t2, 4000);
              Verdict b = check_relation(sos, Rel::BranchingTp, t1, t2, 4000);
              if (s.yes() != b.yes()) {
                why = "strong and branching disagree on a tau/sigma-free pair";
                return false;
              }
              return true;
            });

  return rep;
}

// ---------------------------------------------------------------------------
// JSON

std::string axiom_reports_json(const std::vector<AxiomReport>& reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports)
    j.push_back({{"axiom", r.id},
                 {"relation", r.relation},
                 {"samples", r.samples},
                 {"passed", r.passed},
                 {"failures", r.failures}});
  return j.dump(2);
}

std::string meta_report_json(const MetaReport& report) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : report.entries)
    j.push_back({{"property", e.name},
                 {"samples", e.samples},
                 {"passed", e.passed},
                 {"failures", e.failures}});
  return j.dump(2);
}

}  // namespace drt
