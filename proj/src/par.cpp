#include "drt/par.hpp"

#include <deque>
#include <sstream>

#include <json.hpp>

#include "drt/sos.hpp"
#include "drt/statespace.hpp"

namespace drt {

void ParParams::validate() const {
  if (data < 1) throw TermError("PAR: |D| must be at least 1");
  if (tS < 1 || tR < 1 || tK < 1 || tL < 1 || tSp < 1 || tRp < 1)
    throw TermError("PAR: all times must be non-zero");
}

std::string ParParams::describe() const {
  std::ostringstream os;
  os << "|D|=" << data << " tS=" << tS << " tR=" << tR << " tK=" << tK
     << " tL=" << tL << " tS'=" << tSp << " tR'=" << tRp;
  return os.str();
}

namespace {

struct Names {
  // Per datum d and bit b.
  std::vector<Label> r1, s2;
  std::vector<std::vector<Label>> s3, r3, c3, s4, r4, c4;
  Label s5, r5, c5, s6, r6, c6, err;
};

Names declare_actions(ActionTable& acts, int data) {
  Names n;
  auto frame = [&](const char* base) {
    std::vector<std::vector<Label>> v(data, std::vector<Label>(2));
    for (int d = 0; d < data; ++d)
      for (int b = 0; b < 2; ++b)
        v[d][b] = acts.intern(std::string(base) + "_d" + std::to_string(d) +
                              "b" + std::to_string(b));
    return v;
  };
  for (int d = 0; d < data; ++d) {
    n.r1.push_back(acts.intern("r1_d" + std::to_string(d)));
    n.s2.push_back(acts.intern("s2_d" + std::to_string(d)));
  }
  n.s3 = frame("s3");
  n.r3 = frame("r3");
  n.c3 = frame("c3");
  n.s4 = frame("s4");
  n.r4 = frame("r4");
  n.c4 = frame("c4");
  n.s5 = acts.intern("s5_ack");
  n.r5 = acts.intern("r5_ack");
  n.c5 = acts.intern("c5_ack");
  n.s6 = acts.intern("s6_ack");
  n.r6 = acts.intern("r6_ack");
  n.c6 = acts.intern("c6_ack");
  n.err = acts.intern("error");
  for (int d = 0; d < data; ++d)
    for (int b = 0; b < 2; ++b) {
      acts.set_comm(n.s3[d][b], n.r3[d][b], n.c3[d][b]);
      acts.set_comm(n.s4[d][b], n.r4[d][b], n.c4[d][b]);
    }
  acts.set_comm(n.s5, n.r5, n.c5);
  acts.set_comm(n.s6, n.r6, n.c6);
  acts.set_handshaking(true);
  return n;
}

TermRef act_seq(Label a, TermRef cont) { return mk_seq(mk_act(a), cont); }

int non_negative(int v, const char* what) {
  if (v < 0)
    throw TermError(std::string("PAR: delay exponent ") + what +
                    " is negative; the specification requires t_S' >= "
                    "t_K + t_R + t_R' + t_L");
  return v;
}

}  // namespace

ParCase make_par_case(const ParParams& p) {
  p.validate();
  ParCase c;
  c.p = p;
  Names n = declare_actions(c.acts, p.data);
  c.r1 = n.r1;
  c.s2 = n.s2;

  const int D = p.data;
  auto var = [](const std::string& s) { return var_id(s); };

  // Sender: S_b and SF_{d,b}.
  std::vector<RecEq> sender;
  for (int b = 0; b < 2; ++b) {
    std::vector<TermRef> sums;
    for (int d = 0; d < D; ++d)
      sums.push_back(act_seq(
          n.r1[d],
          mk_delay_n(p.tS,
                     mk_var(var("SF" + std::to_string(d) + "_" +
                                std::to_string(b))))));
    sums.push_back(mk_delay(mk_var(var("S" + std::to_string(b)))));
    sender.push_back({var("S" + std::to_string(b)), mk_alt(sums)});
  }
  for (int d = 0; d < D; ++d)
    for (int b = 0; b < 2; ++b) {
      std::vector<TermRef> waits;
      for (int k = 0; k < p.tSp; ++k)
        waits.push_back(mk_delay_n(
            k, act_seq(n.r5, mk_var(var("S" + std::to_string(1 - b))))));
      waits.push_back(mk_delay_n(
          p.tSp,
          mk_var(var("SF" + std::to_string(d) + "_" + std::to_string(b)))));
      sender.push_back(
          {var("SF" + std::to_string(d) + "_" + std::to_string(b)),
           act_seq(n.s3[d][b], mk_alt(waits))});
    }
  SpecRef sender_spec = intern_spec(std::move(sender), "S");
  TermRef S = mk_rec(var("S0"), sender_spec);

  // Receiver: R_b.
  std::vector<RecEq> receiver;
  for (int b = 0; b < 2; ++b) {
    std::vector<TermRef> sums;
    for (int d = 0; d < D; ++d)
      sums.push_back(act_seq(
          n.r4[d][b],
          mk_delay_n(p.tR,
                     act_seq(n.s2[d],
                             mk_delay_n(p.tRp,
                                        act_seq(n.s6,
                                                mk_var(var(
                                                    "R" +
                                                    std::to_string(1 - b)))))))));
    for (int d = 0; d < D; ++d)
      sums.push_back(act_seq(
          n.r4[d][1 - b],
          mk_delay_n(p.tRp,
                     act_seq(n.s6, mk_var(var("R" + std::to_string(b)))))));
    sums.push_back(mk_delay(mk_var(var("R" + std::to_string(b)))));
    receiver.push_back({var("R" + std::to_string(b)), mk_alt(sums)});
  }
  SpecRef receiver_spec = intern_spec(std::move(receiver), "R");
  TermRef R = mk_rec(var("R0"), receiver_spec);

  // Channels K and L with their error branches.
  auto channel_body = [&](Label ok_out, int t, TermRef cont) {
    std::vector<TermRef> alt;
    alt.push_back(mk_delay_n(t, mk_act(ok_out)));
    for (int k = 0; k <= t; ++k) alt.push_back(mk_delay_n(k, mk_act(n.err)));
    return mk_seq(mk_alt(alt), cont);
  };
  std::vector<TermRef> ksums;
  for (int d = 0; d < D; ++d)
    for (int b = 0; b < 2; ++b)
      ksums.push_back(act_seq(
          n.r3[d][b], channel_body(n.s4[d][b], p.tK, mk_var(var("K")))));
  ksums.push_back(mk_delay(mk_var(var("K"))));
  SpecRef kspec = intern_spec({{var("K"), mk_alt(ksums)}}, "K");
  TermRef K = mk_rec(var("K"), kspec);

  TermRef lbody = mk_alt(
      act_seq(n.r6, channel_body(n.s5, p.tL, mk_var(var("L")))),
      mk_delay(mk_var(var("L"))));
  SpecRef lspec = intern_spec({{var("L"), lbody}}, "L");
  TermRef L = mk_rec(var("L"), lspec);

  // Encapsulated composition and abstraction sets.
  for (int d = 0; d < D; ++d)
    for (int b = 0; b < 2; ++b) {
      c.encap_set.insert(c.encap_set.end(),
                         {n.s3[d][b], n.r3[d][b], n.s4[d][b], n.r4[d][b]});
      c.hide_set.push_back(n.c3[d][b]);
      c.hide_set.push_back(n.c4[d][b]);
    }
  c.encap_set.insert(c.encap_set.end(), {n.s5, n.r5, n.s6, n.r6});
  c.hide_set.insert(c.hide_set.end(), {n.c5, n.c6, n.err});

  c.system =
      mk_encap(c.encap_set, mk_par(S, mk_par(K, mk_par(L, R))));
  c.hidden_system = mk_abstr(c.hide_set, c.system);

  // Expanded specification (X, Y, Z, U, V families).
  {
    std::vector<RecEq> eqs;
    auto Y = [&](int d, int b) {
      return mk_var(var("Y" + std::to_string(d) + "_" + std::to_string(b)));
    };
    auto Z = [&](int d, int b) {
      return mk_var(var("Z" + std::to_string(d) + "_" + std::to_string(b)));
    };
    auto U = [&](int d, int b) {
      return mk_var(var("U" + std::to_string(d) + "_" + std::to_string(b)));
    };
    auto V = [&](int d, int b) {
      return mk_var(var("V" + std::to_string(d) + "_" + std::to_string(b)));
    };
    for (int b = 0; b < 2; ++b) {
      std::vector<TermRef> sums;
      for (int d = 0; d < D; ++d)
        sums.push_back(act_seq(n.r1[d], mk_delay_n(p.tS, Y(d, b))));
      sums.push_back(mk_delay(mk_var(var("X" + std::to_string(b)))));
      eqs.push_back({var("X" + std::to_string(b)), mk_alt(sums)});
    }
    for (int d = 0; d < D; ++d)
      for (int b = 0; b < 2; ++b) {
        std::vector<TermRef> inner;
        inner.push_back(mk_delay_n(
            p.tK,
            act_seq(n.c4[d][b],
                    mk_delay_n(p.tR,
                               act_seq(n.s2[d],
                                       mk_delay_n(p.tRp,
                                                  act_seq(n.c6, Z(d, b))))))));
        for (int k = 0; k <= p.tK; ++k)
          inner.push_back(mk_delay_n(
              k, act_seq(n.err,
                         mk_delay_n(non_negative(p.tSp - k, "tS'-k"),
                                    Y(d, b)))));
        eqs.push_back({var("Y" + std::to_string(d) + "_" + std::to_string(b)),
                       act_seq(n.c3[d][b], mk_alt(inner))});

        std::vector<TermRef> zsums;
        zsums.push_back(mk_delay_n(
            p.tL,
            act_seq(n.c5, mk_var(var("X" + std::to_string(1 - b))))));
        for (int k = 0; k <= p.tL; ++k)
          zsums.push_back(mk_delay_n(
              k,
              act_seq(n.err,
                      mk_delay_n(non_negative(p.tSp - (p.tK + p.tR + p.tRp + k),
                                              "tS'-(tK+tR+tR'+k)"),
                                 U(d, b)))));
        eqs.push_back({var("Z" + std::to_string(d) + "_" + std::to_string(b)),
                       mk_alt(zsums)});

        std::vector<TermRef> usums;
        usums.push_back(act_seq(
            n.c3[d][b],
            mk_alt(mk_delay_n(p.tK,
                              act_seq(n.c4[d][b],
                                      mk_delay_n(p.tRp,
                                                 act_seq(n.c6, V(d, b))))),
                   mk_alt([&] {
                     std::vector<TermRef> es;
                     for (int k = 0; k <= p.tK; ++k)
                       es.push_back(mk_delay_n(
                           k, act_seq(n.err,
                                      mk_delay_n(
                                          non_negative(p.tSp - k, "tS'-k"),
                                          U(d, b)))));
                     return es;
                   }()))));
        eqs.push_back({var("U" + std::to_string(d) + "_" + std::to_string(b)),
                       mk_alt(usums)});

        std::vector<TermRef> vsums;
        vsums.push_back(mk_delay_n(
            p.tL,
            act_seq(n.c5, mk_var(var("X" + std::to_string(1 - b))))));
        for (int k = 0; k <= p.tL; ++k)
          vsums.push_back(mk_delay_n(
              k, act_seq(n.err,
                         mk_delay_n(non_negative(p.tSp - (p.tK + p.tRp + k),
                                                 "tS'-(tK+tR'+k)"),
                                    U(d, b)))));
        eqs.push_back({var("V" + std::to_string(d) + "_" + std::to_string(b)),
                       mk_alt(vsums)});
      }
    SpecRef xspec = intern_spec(std::move(eqs), "Xspec");
    c.xspec = mk_rec(var("X0"), xspec);
    c.hidden_xspec = mk_abstr(c.hide_set, c.xspec);
  }

  // X'': abstraction carried out with the standard axioms only.
  {
    std::vector<RecEq> eqs;
    std::vector<TermRef> xsums;
    for (int d = 0; d < D; ++d)
      xsums.push_back(act_seq(
          n.r1[d],
          mk_delay_n(p.tS, mk_var(var("Ypp" + std::to_string(d))))));
    xsums.push_back(mk_delay(mk_var(var("Xpp"))));
    eqs.push_back({var("Xpp"), mk_alt(xsums)});
    for (int d = 0; d < D; ++d) {
      std::vector<TermRef> ys;
      ys.push_back(mk_delay_n(
          p.tK,
          mk_seq(tau_const(),
                 mk_delay_n(p.tR,
                            act_seq(n.s2[d],
                                    mk_delay_n(p.tRp, mk_var(var("Zpp"))))))));
      for (int k = 0; k <= p.tK; ++k)
        ys.push_back(mk_delay_n(
            k, mk_seq(tau_const(),
                      mk_delay_n(non_negative(p.tSp - k, "tS'-k"),
                                 mk_var(var("Ypp" + std::to_string(d)))))));
      eqs.push_back({var("Ypp" + std::to_string(d)), mk_alt(ys)});
    }
    std::vector<TermRef> zs;
    zs.push_back(
        mk_delay_n(p.tL, mk_seq(tau_const(), mk_var(var("Xpp")))));
    for (int k = 0; k <= p.tL; ++k)
      zs.push_back(mk_delay_n(
          k, mk_seq(tau_const(),
                    mk_delay_n(non_negative(p.tSp - (p.tK + p.tR + p.tRp + k),
                                            "tS'-(tK+tR+tR'+k)"),
                               mk_var(var("Upp"))))));
    eqs.push_back({var("Zpp"), mk_alt(zs)});
    std::vector<TermRef> us;
    us.push_back(mk_delay_n(
        p.tK,
        mk_seq(tau_const(), mk_delay_n(p.tRp, mk_var(var("Vpp"))))));
    for (int k = 0; k <= p.tK; ++k)
      us.push_back(mk_delay_n(
          k, mk_seq(tau_const(),
                    mk_delay_n(non_negative(p.tSp - k, "tS'-k"),
                               mk_var(var("Upp"))))));
    eqs.push_back({var("Upp"), mk_alt(us)});
    std::vector<TermRef> vs;
    vs.push_back(
        mk_delay_n(p.tL, mk_seq(tau_const(), mk_var(var("Xpp")))));
    for (int k = 0; k <= p.tL; ++k)
      vs.push_back(mk_delay_n(
          k, mk_seq(tau_const(),
                    mk_delay_n(non_negative(p.tSp - (p.tK + p.tRp + k),
                                            "tS'-(tK+tR'+k)"),
                               mk_var(var("Upp"))))));
    eqs.push_back({var("Vpp"), mk_alt(vs)});
    SpecRef spec = intern_spec(std::move(eqs), "Xpp");
    c.xpp = mk_rec(var("Xpp"), spec);
  }

  // X''': abstraction with the dormancy axiom available.
  {
    std::vector<RecEq> eqs;
    std::vector<TermRef> xsums;
    for (int d = 0; d < D; ++d)
      xsums.push_back(act_seq(
          n.r1[d],
          mk_delay_n(p.tS, mk_var(var("Yppp" + std::to_string(d))))));
    xsums.push_back(mk_delay(mk_var(var("Xppp"))));
    eqs.push_back({var("Xppp"), mk_alt(xsums)});
    for (int d = 0; d < D; ++d) {
      TermRef after_s2 = mk_alt(
          mk_delay_n(p.tRp + p.tL, mk_seq(tau_const(), mk_var(var("Xppp")))),
          mk_delay_n(non_negative(p.tSp - (p.tK + p.tR), "tS'-(tK+tR)"),
                     mk_var(var("Zppp"))));
      eqs.push_back(
          {var("Yppp" + std::to_string(d)),
           mk_alt(mk_seq(mk_delay_n(p.tK + p.tR, mk_act(n.s2[d])), after_s2),
                  mk_delay_n(p.tSp, mk_var(var("Yppp" + std::to_string(d)))))});
    }
    eqs.push_back(
        {var("Zppp"),
         mk_alt(mk_delay_n(p.tK + p.tRp + p.tL,
                           mk_seq(tau_const(), mk_var(var("Xppp")))),
                mk_delay_n(p.tSp, mk_var(var("Zppp"))))});
    SpecRef spec = intern_spec(std::move(eqs), "Xppp");
    c.xppp = mk_rec(var("Xppp"), spec);
  }

  // X''' in the time-iteration form (single equation, delayable externals).
  if (p.cycle_ok()) {
    int gap2 = non_negative(p.tRp + p.tL + p.tSp - p.tR, "tR'+tL+tS'-tR");
    std::vector<TermRef> xsums;
    for (int d = 0; d < D; ++d) {
      TermRef tail = mk_alt(
          mk_delay_n(p.tRp + p.tL, mk_seq(tau_const(), mk_var(var("Xstar")))),
          mk_time_iter(p.tSp,
                       mk_delay_n(gap2,
                                  mk_seq(tau_const(), mk_var(var("Xstar"))))));
      xsums.push_back(mk_seq(
          delayable(n.r1[d]),
          mk_seq(mk_time_iter(p.tSp,
                              mk_delay_n(p.tS + p.tK + p.tR,
                                         mk_act(n.s2[d]))),
                 tail)));
    }
    SpecRef spec = intern_spec({{var("Xstar"), mk_alt(xsums)}}, "Xstar");
    c.xppp_star = mk_rec(var("Xstar"), spec);
  } else {
    c.xppp_star = nullptr;
  }

  // One-place buffer over the external actions, delayable.
  {
    std::vector<TermRef> sums;
    for (int d = 0; d < D; ++d)
      sums.push_back(mk_seq(delayable(n.r1[d]),
                            mk_seq(delayable(n.s2[d]), mk_var(var("Buf")))));
    SpecRef spec = intern_spec({{var("Buf"), mk_alt(sums)}}, "Buf");
    c.buffer = mk_rec(var("Buf"), spec);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Checks

FunctionalResult check_functional_correctness(const ParParams& p,
                                              size_t max_states) {
  ParCase c = make_par_case(p);
  Sos sos(c.acts);
  FunctionalResult res;
  res.expected_yes = p.cycle_ok();
  TwoPhaseLts sys = explore(sos, c.hidden_system, max_states);
  res.system_states = sys.states.size();
  for (size_t s = 0; s < sys.states.size(); ++s)
    if (!sys.is_tick(StateId(s)) && sys.edges[s].empty() &&
        sys.sigma_next[s] == kNoState)
      res.deadlock_reachable = true;
  TwoPhaseLts buf = explore(sos, expand_time_iteration(c.buffer), max_states);
  UntimedLts usys = time_free_project(sys);
  UntimedLts ubuf = time_free_project(buf);
  UnionUntimed u = make_union(usys, ubuf);
  res.verdict = rooted_branching_untimed(u.lts, u.root1, u.root2, &c.acts);
  return res;
}

PerformanceResult check_performance_spec(const ParParams& p,
                                         size_t max_states) {
  p.validate();
  if (!p.cycle_ok())
    throw TermError("PAR performance analysis requires t_S' > t_K+t_R+t_R'+t_L");
  ParCase c = make_par_case(p);
  Sos sos(c.acts);
  PerformanceResult res;
  TwoPhaseLts sys = explore(sos, c.hidden_system, max_states);
  res.system_states = sys.states.size();
  TwoPhaseLts xpp = explore(sos, c.xpp, max_states);
  TwoPhaseLts xppp = explore(sos, c.xppp, max_states);
  {
    UnionGraph u = make_union(sys, xpp);
    res.sys_vs_xpp_rbts = rooted_branching_ts(u.lts, u.root1, u.root2, &c.acts);
  }
  {
    UnionGraph u = make_union(sys, xppp);
    res.sys_vs_xppp_da = dormancy_aware_rb(u.lts, u.root1, u.root2, &c.acts);
  }
  {
    UnionGraph u = make_union(xpp, xppp);
    res.xpp_vs_xppp_rbts =
        rooted_branching_ts(u.lts, u.root1, u.root2, &c.acts);
    res.xpp_vs_xppp_da = dormancy_aware_rb(u.lts, u.root1, u.root2, &c.acts);
  }
  return res;
}

Verdict check_spec_match(const ParParams& p, size_t max_states) {
  p.validate();
  ParCase c = make_par_case(p);
  Sos sos(c.acts);
  TwoPhaseLts sys = explore(sos, c.hidden_system, max_states);
  TwoPhaseLts ref = explore(sos, c.hidden_xspec, max_states);
  UnionGraph u = make_union(sys, ref);
  return rooted_branching_ts(u.lts, u.root1, u.root2, &c.acts);
}

DeliveryTiming delivery_timing(const ParParams& p, int horizon,
                               size_t max_states) {
  p.validate();
  if (!p.cycle_ok())
    throw TermError("PAR delivery timing requires t_S' > t_K+t_R+t_R'+t_L");
  ParCase c = make_par_case(p);
  Sos sos(c.acts);
  TwoPhaseLts sys = explore(sos, c.hidden_system, max_states);
  std::set<Label> r1set(c.r1.begin(), c.r1.end());
  std::set<Label> s2set(c.s2.begin(), c.s2.end());

  // Sigma-counting BFS from a set of start states; a branch is closed when a
  // label from `stops` becomes enabled, recording the count.
  auto count_until = [&](const std::vector<StateId>& starts,
                         const std::set<Label>& stops) {
    std::set<int> found;
    std::set<std::pair<StateId, int>> seen;
    std::deque<std::pair<StateId, int>> work;
    for (StateId s : starts) work.push_back({s, 0});
    while (!work.empty()) {
      auto [s, cnt] = work.front();
      work.pop_front();
      if (cnt > horizon || !seen.insert({s, cnt}).second) continue;
      bool stop_here = false;
      for (const Edge& e : sys.edges[size_t(s)])
        if (stops.count(e.label)) stop_here = true;
      if (stop_here) {
        found.insert(cnt);
        continue;
      }
      for (const Edge& e : sys.edges[size_t(s)])
        if (e.label == kTau) work.push_back({e.target, cnt});
      if (sys.sigma_next[size_t(s)] != kNoState)
        work.push_back({sys.sigma_next[size_t(s)], cnt + 1});
    }
    return found;
  };

  std::vector<StateId> post_r1, post_s2;
  for (size_t s = 0; s < sys.states.size(); ++s)
    for (const Edge& e : sys.edges[s]) {
      if (r1set.count(e.label)) post_r1.push_back(e.target);
      if (s2set.count(e.label)) post_s2.push_back(e.target);
    }

  DeliveryTiming out;
  out.delivery_delays = count_until(post_r1, s2set);
  out.post_gaps = count_until(post_s2, r1set);
  out.first = out.delivery_delays.empty() ? -1 : *out.delivery_delays.begin();
  return out;
}

std::string par_report_json(const ParParams& p, const std::string& mode,
                            const FunctionalResult* fr,
                            const PerformanceResult* pr, const Verdict* match,
                            const DeliveryTiming* dt) {
  nlohmann::json j;
  j["params"] = {{"data", p.data}, {"tS", p.tS},   {"tR", p.tR},
                 {"tK", p.tK},     {"tL", p.tL},   {"tSp", p.tSp},
                 {"tRp", p.tRp},   {"cycle_ok", p.cycle_ok()}};
  j["mode"] = mode;
  if (fr) {
    j["functional"] = {{"answer", answer_name(fr->verdict.answer)},
                       {"expected", fr->expected_yes ? "yes" : "no"},
                       {"deadlock_reachable", fr->deadlock_reachable},
                       {"system_states", fr->system_states},
                       {"pass", fr->pass()}};
  }
  if (pr) {
    j["performance"] = {
        {"system_vs_xpp_rbts", answer_name(pr->sys_vs_xpp_rbts.answer)},
        {"system_vs_xppp_da", answer_name(pr->sys_vs_xppp_da.answer)},
        {"xpp_vs_xppp_rbts", answer_name(pr->xpp_vs_xppp_rbts.answer)},
        {"xpp_vs_xppp_da", answer_name(pr->xpp_vs_xppp_da.answer)},
        {"system_states", pr->system_states},
        {"pass", pr->pass()}};
  }
  if (match) j["spec_match"] = answer_name(match->answer);
  if (dt) {
    j["delivery"] = {{"first", dt->first},
                     {"delays", std::vector<int>(dt->delivery_delays.begin(),
                                                 dt->delivery_delays.end())},
                     {"gaps", std::vector<int>(dt->post_gaps.begin(),
                                               dt->post_gaps.end())}};
  }
  return j.dump(2);
}

}  // namespace drt
