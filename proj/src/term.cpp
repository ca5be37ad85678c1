#include "drt/term.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace drt {

// ---------------------------------------------------------------------------
// ActionTable

ActionTable::ActionTable() : names_{"tau", "delta"} {}

Label ActionTable::intern(const std::string& name) {
  if (name == "tau" || name == "delta")
    throw TermError("'" + name + "' cannot be declared as an action");
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  Label id = static_cast<Label>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

std::optional<Label> ActionTable::find(const std::string& name) const {
  if (name == "tau") return kTau;
  if (name == "delta") return kDelta;
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& ActionTable::name(Label l) const {
  return names_.at(static_cast<size_t>(l));
}

std::vector<Label> ActionTable::actions() const {
  std::vector<Label> out;
  for (Label l = 2; l < static_cast<Label>(names_.size()); ++l) out.push_back(l);
  return out;
}

void ActionTable::set_comm(Label a, Label b, Label c) {
  if (!is_observable(a) || !is_observable(b) || !is_observable(c))
    throw TermError("communication is only defined between observable actions");
  auto key = std::minmax(a, b);
  auto it = comm_.find(key);
  if (it != comm_.end() && it->second != c)
    throw TermError("conflicting communication for " + name(a) + "|" + name(b));
  comm_[key] = c;
}

std::optional<Label> ActionTable::comm(Label a, Label b) const {
  if (!is_observable(a) || !is_observable(b)) return std::nullopt;
  auto it = comm_.find(std::minmax(a, b));
  if (it == comm_.end()) return std::nullopt;
  return it->second;
}

bool ActionTable::comm_is_handshaking() const {
  for (const auto& [key, res] : comm_) {
    (void)key;
    for (Label c = 2; c < static_cast<Label>(names_.size()); ++c)
      if (comm(res, c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Interners

namespace {

struct VarTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::mutex mu;
};
VarTable& vars() {
  static VarTable t;
  return t;
}

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

size_t term_hash(const Term& t) {
  size_t h = static_cast<size_t>(t.kind) * 0x100000001b3ULL;
  h = mix(h, static_cast<size_t>(t.act + 7));
  h = mix(h, t.nat);
  if (t.kind != Kind::Rec) h = mix(h, static_cast<size_t>(t.var + 13));
  for (Label l : t.set) h = mix(h, static_cast<size_t>(l) + 0x51ULL);
  for (TermRef k : t.kids) h = mix(h, k->hash);
  if (t.spec) {
    h = mix(h, std::hash<std::string>{}(t.spec->sig));
    h = mix(h, static_cast<size_t>(t.spec->canon_of(t.var) + 31));
  }
  return h;
}

bool term_shallow_eq(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Rec) {
    if (a.spec == b.spec && a.var == b.var) return true;
    return a.spec->sig == b.spec->sig &&
           a.spec->canon_of(a.var) == b.spec->canon_of(b.var);
  }
  return a.act == b.act && a.nat == b.nat && a.var == b.var &&
         a.set == b.set && a.kids == b.kids && a.spec == b.spec;
}

struct TermHash {
  size_t operator()(const Term* t) const { return t->hash; }
};
struct TermEq {
  bool operator()(const Term* a, const Term* b) const {
    return term_shallow_eq(*a, *b);
  }
};

struct TermPool {
  std::unordered_set<Term*, TermHash, TermEq> pool;
  std::vector<std::unique_ptr<Term>> storage;
  uint64_t next_uid = 1;
  std::mutex mu;
};
TermPool& terms() {
  static TermPool p;
  return p;
}

TermRef intern(Term&& t) {
  t.hash = term_hash(t);
  TermPool& p = terms();
  std::lock_guard<std::mutex> lock(p.mu);
  auto it = p.pool.find(&t);
  if (it != p.pool.end()) return *it;
  p.storage.push_back(std::make_unique<Term>(std::move(t)));
  Term* stored = p.storage.back().get();
  stored->uid = p.next_uid++;
  p.pool.insert(stored);
  return stored;
}

struct SpecPool {
  std::unordered_map<std::string, std::unique_ptr<RecSpec>> pool;
  std::mutex mu;
};
SpecPool& specs() {
  static SpecPool p;
  return p;
}

}  // namespace

int var_id(const std::string& name) {
  VarTable& t = vars();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  int id = static_cast<int>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& var_name(int id) {
  VarTable& t = vars();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names.at(static_cast<size_t>(id));
}

TermRef RecSpec::rhs_of(int v) const {
  for (const auto& eq : eqs)
    if (eq.var == v) return eq.rhs;
  throw TermError("no equation for variable " + var_name(v));
}

bool RecSpec::has_var(int v) const {
  for (const auto& eq : eqs)
    if (eq.var == v) return true;
  return false;
}

int RecSpec::canon_of(int v) const {
  auto it = canon.find(v);
  if (it == canon.end())
    throw TermError("variable " + var_name(v) + " is not part of the spec");
  return it->second;
}

// ---------------------------------------------------------------------------
// Factories

TermRef mk_act(Label a) {
  Term t;
  t.kind = Kind::Act;
  t.act = a;
  return intern(std::move(t));
}

TermRef tau_const() { return mk_act(kTau); }
TermRef delta_const() { return mk_act(kDelta); }

static TermRef mk2(Kind k, TermRef l, TermRef r) {
  Term t;
  t.kind = k;
  t.kids = {l, r};
  return intern(std::move(t));
}

static TermRef mk1(Kind k, TermRef x) {
  Term t;
  t.kind = k;
  t.kids = {x};
  return intern(std::move(t));
}

TermRef mk_alt(TermRef l, TermRef r) { return mk2(Kind::Alt, l, r); }

TermRef mk_alt(const std::vector<TermRef>& summands) {
  if (summands.empty()) return delta_const();
  TermRef acc = summands.back();
  for (size_t i = summands.size() - 1; i-- > 0;) acc = mk_alt(summands[i], acc);
  return acc;
}

TermRef mk_seq(TermRef l, TermRef r) { return mk2(Kind::Seq, l, r); }
TermRef mk_delay(TermRef x) { return mk1(Kind::Delay, x); }

TermRef mk_delay_n(uint32_t n, TermRef x) {
  TermRef acc = x;
  for (uint32_t i = 0; i < n; ++i) acc = mk_delay(acc);
  return acc;
}

TermRef mk_par(TermRef l, TermRef r) { return mk2(Kind::Par, l, r); }
TermRef mk_left_merge(TermRef l, TermRef r) { return mk2(Kind::LeftMerge, l, r); }
TermRef mk_comm_merge(TermRef l, TermRef r) { return mk2(Kind::CommMerge, l, r); }

static TermRef mk_set_op(Kind k, std::vector<Label> s, TermRef x) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (Label l : s)
    if (!is_observable(l))
      throw TermError("encapsulation/abstraction sets contain observable actions only");
  Term t;
  t.kind = k;
  t.set = std::move(s);
  t.kids = {x};
  return intern(std::move(t));
}

TermRef mk_encap(std::vector<Label> hs, TermRef x) {
  return mk_set_op(Kind::Encap, std::move(hs), x);
}
TermRef mk_abstr(std::vector<Label> is, TermRef x) {
  return mk_set_op(Kind::Abstr, std::move(is), x);
}

TermRef mk_timeout(TermRef x) { return mk1(Kind::Timeout, x); }
TermRef mk_shift(TermRef x) { return mk1(Kind::Shift, x); }
TermRef mk_time_free(TermRef x) { return mk1(Kind::TimeFree, x); }

TermRef mk_time_iter(uint32_t n, TermRef x) {
  Term t;
  t.kind = Kind::TimeIter;
  t.nat = n;
  t.kids = {x};
  return intern(std::move(t));
}

TermRef mk_var(int var) {
  Term t;
  t.kind = Kind::Var;
  t.var = var;
  return intern(std::move(t));
}

TermRef mk_rec(int var, SpecRef spec) {
  if (!spec->has_var(var))
    throw TermError("recursion constant refers to undefined variable " + var_name(var));
  Term t;
  t.kind = Kind::Rec;
  t.var = var;
  t.spec = spec;
  return intern(std::move(t));
}

TermRef delayable(Label a) {
  static std::mutex mu;
  static std::unordered_map<Label, TermRef> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(a);
  if (it != cache.end()) return it->second;
  int x = var_id("D$" + std::to_string(a));
  SpecRef spec =
      intern_spec({{x, mk_alt(mk_act(a), mk_delay(mk_var(x)))}}, "");
  TermRef r = mk_rec(x, spec);
  cache.emplace(a, r);
  return r;
}

// ---------------------------------------------------------------------------
// Structural order

int term_cmp(TermRef a, TermRef b) {
  if (a == b) return 0;
  if (a->kind != b->kind)
    return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
  switch (a->kind) {
    case Kind::Act:
      return a->act < b->act ? -1 : a->act > b->act ? 1 : 0;
    case Kind::Var:
      return a->var < b->var ? -1 : a->var > b->var ? 1 : 0;
    case Kind::Rec: {
      if (a->spec != b->spec) {
        int c = a->spec->sig.compare(b->spec->sig);
        if (c != 0) return c < 0 ? -1 : 1;
      }
      int ca = a->spec->canon_of(a->var), cb = b->spec->canon_of(b->var);
      return ca < cb ? -1 : ca > cb ? 1 : 0;
    }
    default: {
      if (a->nat != b->nat) return a->nat < b->nat ? -1 : 1;
      if (a->set != b->set) return a->set < b->set ? -1 : 1;
      if (a->kids.size() != b->kids.size())
        return a->kids.size() < b->kids.size() ? -1 : 1;
      for (size_t i = 0; i < a->kids.size(); ++i) {
        int c = term_cmp(a->kids[i], b->kids[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

void collect_summands(TermRef t, std::vector<TermRef>& out) {
  if (t->is(Kind::Alt)) {
    collect_summands(t->kids[0], out);
    collect_summands(t->kids[1], out);
  } else {
    out.push_back(t);
  }
}

struct SpecSig {
  std::string sig;
  std::map<int, int> canon;
};
SpecSig spec_signature(const std::vector<RecEq>& eqs, int entry);

// Canonicalizes all right-hand sides and re-interns the spec. Cached per
// spec pointer.
SpecRef canonical_spec(SpecRef s) {
  static std::mutex mu;
  static std::unordered_map<SpecRef, SpecRef> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
  }
  std::vector<RecEq> eqs;
  eqs.reserve(s->eqs.size());
  for (const auto& eq : s->eqs) eqs.push_back({eq.var, canonicalize(eq.rhs)});
  SpecRef canon = intern_spec(std::move(eqs), s->label);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(s, canon);
  return canon;
}

}  // namespace

TermRef canonicalize(TermRef t) {
  static std::mutex mu;
  static std::unordered_map<TermRef, TermRef> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
  }
  TermRef result = nullptr;
  switch (t->kind) {
    case Kind::Act:
    case Kind::Var:
      result = t;
      break;
    case Kind::Rec:
      result = mk_rec(t->var, canonical_spec(t->spec));
      break;
    case Kind::Alt: {
      std::vector<TermRef> raw;
      collect_summands(t, raw);
      std::vector<TermRef> canon;
      canon.reserve(raw.size());
      for (TermRef s : raw) {
        TermRef c = canonicalize(s);
        if (c->is(Kind::Alt))
          collect_summands(c, canon);
        else
          canon.push_back(c);
      }
      std::sort(canon.begin(), canon.end(), TermLess{});
      canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
      if (canon.size() > 1) {
        TermRef dd = delta_const();
        canon.erase(std::remove(canon.begin(), canon.end(), dd), canon.end());
        if (canon.empty()) canon.push_back(dd);
      }
      result = mk_alt(canon);
      break;
    }
    default: {
      Term nt;
      nt.kind = t->kind;
      nt.act = t->act;
      nt.nat = t->nat;
      nt.set = t->set;
      nt.var = t->var;
      nt.spec = t->spec;
      for (TermRef k : t->kids) nt.kids.push_back(canonicalize(k));
      result = intern(std::move(nt));
      break;
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(t, result);
  if (t != result) cache.emplace(result, result);
  return result;
}

// ---------------------------------------------------------------------------
// Substitution and free variables

TermRef substitute(TermRef t, const std::map<int, TermRef>& binding) {
  switch (t->kind) {
    case Kind::Act:
    case Kind::Rec:  // specs are closed, nothing to substitute below
      return t;
    case Kind::Var: {
      auto it = binding.find(t->var);
      return it == binding.end() ? t : it->second;
    }
    default: {
      Term nt;
      nt.kind = t->kind;
      nt.act = t->act;
      nt.nat = t->nat;
      nt.set = t->set;
      nt.var = t->var;
      nt.spec = t->spec;
      bool changed = false;
      for (TermRef k : t->kids) {
        TermRef nk = substitute(k, binding);
        changed |= nk != k;
        nt.kids.push_back(nk);
      }
      return changed ? intern(std::move(nt)) : t;
    }
  }
}

void free_vars(TermRef t, std::set<int>& out) {
  switch (t->kind) {
    case Kind::Act:
    case Kind::Rec:
      return;
    case Kind::Var:
      out.insert(t->var);
      return;
    default:
      for (TermRef k : t->kids) free_vars(k, out);
  }
}

bool is_closed(TermRef t) {
  std::set<int> fv;
  free_vars(t, fv);
  return fv.empty();
}

// ---------------------------------------------------------------------------
// Specifications

SpecRef intern_spec(std::vector<RecEq> eqs, const std::string& label) {
  std::set<int> lhs;
  for (const auto& eq : eqs)
    if (!lhs.insert(eq.var).second)
      throw TermError("duplicate equation for variable " + var_name(eq.var));
  for (const auto& eq : eqs) {
    std::set<int> fv;
    free_vars(eq.rhs, fv);
    for (int v : fv)
      if (!lhs.count(v))
        throw TermError("right-hand side of " + var_name(eq.var) +
                        " uses unbound variable " + var_name(v));
  }
  SpecSig ss = spec_signature(eqs, eqs.empty() ? -1 : eqs.front().var);
  std::string key = ss.sig + "#";
  for (const auto& eq : eqs) key += std::to_string(eq.var) + ",";
  SpecPool& p = specs();
  std::lock_guard<std::mutex> lock(p.mu);
  auto it = p.pool.find(key);
  if (it != p.pool.end()) return it->second.get();
  auto spec = std::make_unique<RecSpec>();
  spec->eqs = std::move(eqs);
  spec->label = label;
  spec->sig = std::move(ss.sig);
  spec->canon = std::move(ss.canon);
  spec->id = static_cast<int>(p.pool.size());
  RecSpec* raw = spec.get();
  p.pool.emplace(key, std::move(spec));
  return raw;
}

namespace {

// Signature printing with discovery-order variable renaming, so that specs
// that differ only in variable names are identified.
struct SigPrinter {
  const std::vector<RecEq>& eqs;
  std::map<int, int> rename;
  std::vector<int> order;
  std::ostringstream os;

  explicit SigPrinter(const std::vector<RecEq>& e) : eqs(e) {}

  int touch(int v) {
    auto it = rename.find(v);
    if (it != rename.end()) return it->second;
    int id = static_cast<int>(rename.size());
    rename.emplace(v, id);
    order.push_back(v);
    return id;
  }

  void walk(TermRef t) {
    os << static_cast<int>(t->kind) << '(';
    switch (t->kind) {
      case Kind::Act:
        os << t->act;
        break;
      case Kind::Var:
        os << 'v' << touch(t->var);
        break;
      case Kind::Rec:
        os << 'r' << t->spec->id << ':' << t->var;
        break;
      default:
        os << t->nat << '[';
        for (Label l : t->set) os << l << ',';
        os << ']';
        for (TermRef k : t->kids) walk(k);
        break;
    }
    os << ')';
  }
};

SpecSig spec_signature(const std::vector<RecEq>& eqs, int entry) {
  SigPrinter p(eqs);
  if (entry >= 0) p.touch(entry);
  std::set<int> done;
  size_t next = 0;
  auto emit = [&](int v) {
    done.insert(v);
    p.os << 'E' << p.rename.at(v) << '=';
    for (const auto& eq : eqs)
      if (eq.var == v) p.walk(eq.rhs);
    p.os << ';';
  };
  // Equations in discovery order; disconnected ones seed by variable id.
  while (done.size() < eqs.size()) {
    while (next < p.order.size()) {
      int v = p.order[next++];
      if (!done.count(v)) emit(v);
    }
    if (done.size() == eqs.size()) break;
    int seed = -1;
    for (const auto& eq : eqs)
      if (!done.count(eq.var) && !p.rename.count(eq.var) &&
          (seed < 0 || eq.var < seed))
        seed = eq.var;
    if (seed < 0) break;
    p.touch(seed);
  }
  return {p.os.str(), p.rename};
}

}  // namespace

// ---------------------------------------------------------------------------
// Guardedness

namespace {

// Left-factor guard analysis: a sequential left factor guards what follows
// when every termination path through it performs an observable action or a
// sigma (vacuously true for factors that never terminate). Computed as a
// greatest fixpoint over specification variables.
struct GuardCtx {
  const std::map<int, bool>* var_lg = nullptr;  // variables of the current spec
  std::map<std::pair<SpecRef, bool>, std::map<int, bool>> rec_memo;
};

bool left_guards(TermRef t, bool no_sigma, GuardCtx& ctx);

const std::map<int, bool>& spec_lg(SpecRef s, bool no_sigma, GuardCtx& ctx) {
  auto key = std::make_pair(s, no_sigma);
  auto it = ctx.rec_memo.find(key);
  if (it != ctx.rec_memo.end()) return it->second;
  std::map<int, bool>& lg = ctx.rec_memo[key];
  for (const auto& eq : s->eqs) lg[eq.var] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    const std::map<int, bool>* outer = ctx.var_lg;
    ctx.var_lg = &lg;
    for (const auto& eq : s->eqs) {
      bool v = left_guards(eq.rhs, no_sigma, ctx);
      if (v != lg[eq.var]) {
        lg[eq.var] = v;
        changed = true;
      }
    }
    ctx.var_lg = outer;
  }
  return lg;
}

bool left_guards(TermRef t, bool no_sigma, GuardCtx& ctx) {
  switch (t->kind) {
    case Kind::Act:
      return t->act != kTau;  // delta never terminates, observables guard
    case Kind::Var: {
      if (!ctx.var_lg) return false;
      auto it = ctx.var_lg->find(t->var);
      return it != ctx.var_lg->end() && it->second;
    }
    case Kind::Alt:
      return left_guards(t->kids[0], no_sigma, ctx) &&
             left_guards(t->kids[1], no_sigma, ctx);
    case Kind::Seq:
    case Kind::Par:
    case Kind::LeftMerge:
      return left_guards(t->kids[0], no_sigma, ctx) ||
             left_guards(t->kids[1], no_sigma, ctx);
    case Kind::CommMerge:
      return true;  // communication results are observable actions
    case Kind::Delay:
      return !no_sigma;
    case Kind::Encap:
    case Kind::Timeout:
      return left_guards(t->kids[0], no_sigma, ctx);
    case Kind::Abstr:
      return false;  // abstraction may silence the guarding actions
    case Kind::TimeFree:
      return left_guards(t->kids[0], true, ctx);
    case Kind::TimeIter:
      return left_guards(t->kids[0], no_sigma, ctx);
    case Kind::Rec: {
      const std::map<int, bool>* outer = ctx.var_lg;
      ctx.var_lg = nullptr;
      const auto& lg = spec_lg(t->spec, no_sigma, ctx);
      ctx.var_lg = outer;
      auto it = lg.find(t->var);
      return it != lg.end() && it->second;
    }
    case Kind::Shift:
      return false;
  }
  return false;
}

// Collects variable occurrences that are not under an observable action
// prefix, a sigma, or a guarding left factor. `no_sigma_guard` is set below
// time-free projection, `killed` below an abstraction operator.
void unguarded_vars(TermRef t, bool no_sigma_guard, bool killed, GuardCtx& ctx,
                    std::set<int>& out) {
  switch (t->kind) {
    case Kind::Act:
    case Kind::Rec:
      return;
    case Kind::Var:
      out.insert(t->var);
      return;
    case Kind::Seq: {
      TermRef l = t->kids[0];
      if (!killed && left_guards(l, no_sigma_guard, ctx)) {
        unguarded_vars(l, no_sigma_guard, killed, ctx, out);
        return;
      }
      unguarded_vars(l, no_sigma_guard, killed, ctx, out);
      unguarded_vars(t->kids[1], no_sigma_guard, killed, ctx, out);
      return;
    }
    case Kind::Delay:
      if (!killed && !no_sigma_guard) return;
      unguarded_vars(t->kids[0], no_sigma_guard, killed, ctx, out);
      return;
    case Kind::Abstr:
      unguarded_vars(t->kids[0], no_sigma_guard, true, ctx, out);
      return;
    case Kind::TimeFree:
      unguarded_vars(t->kids[0], true, killed, ctx, out);
      return;
    default:
      for (TermRef k : t->kids)
        unguarded_vars(k, no_sigma_guard, killed, ctx, out);
      return;
  }
}

void collect_specs(TermRef t, std::set<SpecRef>& out) {
  switch (t->kind) {
    case Kind::Act:
    case Kind::Var:
      return;
    case Kind::Rec:
      if (out.insert(t->spec).second)
        for (const auto& eq : t->spec->eqs) collect_specs(eq.rhs, out);
      return;
    default:
      for (TermRef k : t->kids) collect_specs(k, out);
  }
}

bool spec_guarded(SpecRef spec, unsigned depth) {
  GuardCtx ctx;
  const std::map<int, bool>& lg = spec_lg(spec, false, ctx);
  std::map<int, TermRef> defs;
  for (const auto& eq : spec->eqs) defs.emplace(eq.var, eq.rhs);
  for (const auto& eq : spec->eqs) {
    TermRef cur = eq.rhs;
    bool ok = false;
    for (unsigned round = 0; round <= depth; ++round) {
      std::set<int> bad;
      ctx.var_lg = &lg;
      unguarded_vars(cur, false, false, ctx, bad);
      ctx.var_lg = nullptr;
      if (bad.empty()) {
        ok = true;
        break;
      }
      if (round == depth) break;
      std::map<int, TermRef> step;
      for (int v : bad) step.emplace(v, defs.at(v));
      TermRef next = substitute(cur, step);
      if (next == cur) break;
      cur = next;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool check_guarded(SpecRef spec, unsigned unfold_depth) {
  if (!spec_guarded(spec, unfold_depth)) return false;
  // Nested specifications must be guarded as well.
  std::set<SpecRef> nested;
  for (const auto& eq : spec->eqs) collect_specs(eq.rhs, nested);
  for (SpecRef s : nested)
    if (s != spec && !spec_guarded(s, unfold_depth)) return false;
  return true;
}

bool check_guarded_term(TermRef t, unsigned unfold_depth) {
  std::set<SpecRef> all;
  collect_specs(t, all);
  for (SpecRef s : all)
    if (!spec_guarded(s, unfold_depth)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Time iteration expansion

namespace {
std::atomic<uint64_t> fresh_counter{0};

int fresh_var(const char* prefix) {
  return var_id(std::string(prefix) + std::to_string(fresh_counter++));
}
}  // namespace

namespace {

// Rewrites time iterations below t. Iterations whose body uses enclosing
// specification variables cannot form a self-contained constant; their
// defining equations are emitted into `extra` and joined with the enclosing
// specification.
TermRef expand_iter(TermRef t, std::vector<RecEq>* extra) {
  switch (t->kind) {
    case Kind::Act:
    case Kind::Var:
      return t;
    case Kind::Rec: {
      bool dirty = false;
      std::vector<RecEq> eqs;
      std::vector<RecEq> nested;
      for (const auto& eq : t->spec->eqs) {
        TermRef rhs = expand_iter(eq.rhs, &nested);
        dirty |= rhs != eq.rhs;
        eqs.push_back({eq.var, rhs});
      }
      if (!dirty && nested.empty()) return t;
      for (auto& eq : nested) eqs.push_back(eq);
      return mk_rec(t->var, intern_spec(std::move(eqs), t->spec->label));
    }
    case Kind::TimeIter: {
      if (t->nat == 0)
        throw TermError(
            "degenerate iteration: sigma*0 has an unguarded defining equation");
      TermRef body = expand_iter(t->kids[0], extra);
      int x = fresh_var("TI$");
      RecEq eq{x, mk_alt(body, mk_delay_n(t->nat, mk_var(x)))};
      if (is_closed(body) || !extra) {
        return mk_rec(x, intern_spec({eq}, ""));
      }
      extra->push_back(eq);
      return mk_var(x);
    }
    default: {
      Term nt;
      nt.kind = t->kind;
      nt.act = t->act;
      nt.nat = t->nat;
      nt.set = t->set;
      nt.var = t->var;
      nt.spec = t->spec;
      bool changed = false;
      for (TermRef k : t->kids) {
        TermRef nk = expand_iter(k, extra);
        changed |= nk != k;
        nt.kids.push_back(nk);
      }
      return changed ? intern(std::move(nt)) : t;
    }
  }
}

}  // namespace

TermRef expand_time_iteration(TermRef t) { return expand_iter(t, nullptr); }

// ---------------------------------------------------------------------------
// Nested recursion flattening

namespace {

// Rewrites a right-hand side: inner recursion constants <Y|E'> are replaced by
// the (recursively flattened and renamed-apart) defining right-hand side of Y,
// and E''s renamed equations are emitted into `extra`.
struct Flattener {
  std::map<SpecRef, std::map<int, int>> renamings;
  std::vector<RecEq> extra;

  TermRef strip(TermRef t) {
    switch (t->kind) {
      case Kind::Act:
      case Kind::Var:
        return t;
      case Kind::Rec: {
        TermRef flat = flatten_recursion(t);  // inner spec now rec-free
        SpecRef inner = flat->spec;
        auto [it, fresh] = renamings.try_emplace(inner);
        if (fresh) {
          for (const auto& eq : inner->eqs)
            it->second.emplace(eq.var, fresh_var("F$"));
          std::map<int, TermRef> sub;
          for (const auto& [ov, nv] : it->second) sub.emplace(ov, mk_var(nv));
          for (const auto& eq : inner->eqs)
            extra.push_back({it->second.at(eq.var), substitute(eq.rhs, sub)});
        }
        return mk_var(it->second.at(flat->var));
      }
      default: {
        Term nt;
        nt.kind = t->kind;
        nt.act = t->act;
        nt.nat = t->nat;
        nt.set = t->set;
        nt.var = t->var;
        nt.spec = t->spec;
        for (TermRef k : t->kids) nt.kids.push_back(strip(k));
        return intern(std::move(nt));
      }
    }
  }
};

bool spec_has_rec(SpecRef s) {
  std::set<SpecRef> nested;
  for (const auto& eq : s->eqs) collect_specs(eq.rhs, nested);
  return !nested.empty();
}

}  // namespace

TermRef flatten_recursion(TermRef rec_term) {
  if (!rec_term->is(Kind::Rec))
    throw TermError("flatten_recursion expects a recursion constant");
  if (!check_guarded(rec_term->spec))
    throw TermError("flatten_recursion: specification is not guarded");
  if (!spec_has_rec(rec_term->spec)) return rec_term;
  Flattener fl;
  std::vector<RecEq> eqs;
  for (const auto& eq : rec_term->spec->eqs)
    eqs.push_back({eq.var, fl.strip(eq.rhs)});
  for (const auto& eq : fl.extra) eqs.push_back(eq);
  SpecRef flat = intern_spec(std::move(eqs), rec_term->spec->label);
  return mk_rec(rec_term->var, flat);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels: alt < merges < seq < unary/atom.
enum { kPrecAlt = 0, kPrecMerge = 1, kPrecSeq = 2, kPrecAtom = 3 };

struct Printer {
  const ActionTable& acts;
  bool compact;
  std::ostringstream os;

  // Collapses sigma chains for readability.
  static std::pair<uint32_t, TermRef> peel_delays(TermRef t) {
    uint32_t n = 0;
    while (t->is(Kind::Delay)) {
      ++n;
      t = t->kids[0];
    }
    return {n, t};
  }

  static bool is_delayable_sugar(TermRef t, Label& out) {
    if (!t->is(Kind::Rec) || t->spec->eqs.size() != 1) return false;
    const RecEq& eq = t->spec->eqs.front();
    if (eq.var != t->var) return false;
    TermRef rhs = eq.rhs;
    if (!rhs->is(Kind::Alt)) return false;
    TermRef l = rhs->kids[0], r = rhs->kids[1];
    if (l->is(Kind::Act) && r->is(Kind::Delay) && r->kids[0]->is(Kind::Var) &&
        r->kids[0]->var == eq.var) {
      out = l->act;
      return true;
    }
    if (r->is(Kind::Act) && l->is(Kind::Delay) && l->kids[0]->is(Kind::Var) &&
        l->kids[0]->var == eq.var) {
      out = r->act;
      return true;
    }
    return false;
  }

  void action_set(const std::vector<Label>& s) {
    os << '{';
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) os << ',';
      os << acts.name(s[i]);
    }
    os << '}';
  }

  void walk(TermRef t, int prec) {
    switch (t->kind) {
      case Kind::Act:
        if (t->act == kTau)
          os << "tau";
        else if (t->act == kDelta)
          os << "delta";
        else
          os << "u(" << acts.name(t->act) << ")";
        return;
      case Kind::Alt:
        if (prec > kPrecAlt) os << '(';
        walk(t->kids[0], kPrecAlt);
        os << " + ";
        walk(t->kids[1], kPrecAlt);
        if (prec > kPrecAlt) os << ')';
        return;
      case Kind::Seq:
        if (prec > kPrecSeq) os << '(';
        walk(t->kids[0], kPrecAtom);
        os << " . ";
        walk(t->kids[1], kPrecSeq);
        if (prec > kPrecSeq) os << ')';
        return;
      case Kind::Delay: {
        auto [n, inner] = peel_delays(t);
        if (n == 1)
          os << "sigma(";
        else
          os << "sigma^" << n << "(";
        walk(inner, kPrecAlt);
        os << ')';
        return;
      }
      case Kind::Par:
      case Kind::LeftMerge:
      case Kind::CommMerge: {
        const char* op = t->is(Kind::Par) ? " || "
                         : t->is(Kind::LeftMerge) ? " |_ "
                                                  : " | ";
        if (prec > kPrecMerge) os << '(';
        walk(t->kids[0], kPrecSeq);
        os << op;
        walk(t->kids[1], kPrecSeq);
        if (prec > kPrecMerge) os << ')';
        return;
      }
      case Kind::Encap:
      case Kind::Abstr:
        os << (t->is(Kind::Encap) ? "encap(" : "hide(");
        action_set(t->set);
        os << ", ";
        walk(t->kids[0], kPrecAlt);
        os << ')';
        return;
      case Kind::Timeout:
        os << "to(";
        walk(t->kids[0], kPrecAlt);
        os << ')';
        return;
      case Kind::Shift:
        os << "shift(";
        walk(t->kids[0], kPrecAlt);
        os << ')';
        return;
      case Kind::TimeFree:
        os << "tf(";
        walk(t->kids[0], kPrecAlt);
        os << ')';
        return;
      case Kind::TimeIter:
        os << "sigma*" << t->nat << "(";
        walk(t->kids[0], kPrecAlt);
        os << ')';
        return;
      case Kind::Var:
        os << var_name(t->var);
        return;
      case Kind::Rec: {
        Label a;
        if (is_delayable_sugar(t, a) && is_observable(a)) {
          os << acts.name(a);
          return;
        }
        os << '<' << var_name(t->var) << " | ";
        if (compact) {
          os << (t->spec->label.empty() ? "#" + std::to_string(t->spec->id)
                                        : t->spec->label);
        } else {
          for (size_t i = 0; i < t->spec->eqs.size(); ++i) {
            if (i) os << "; ";
            os << var_name(t->spec->eqs[i].var) << " = ";
            walk(t->spec->eqs[i].rhs, kPrecAlt);
          }
        }
        os << '>';
        return;
      }
    }
  }
};

}  // namespace

std::string term_to_text(TermRef t, const ActionTable& acts, bool compact_rec) {
  Printer p{acts, compact_rec, {}};
  p.walk(t, kPrecAlt);
  return p.os.str();
}

}  // namespace drt
