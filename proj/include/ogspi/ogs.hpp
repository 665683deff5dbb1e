#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ogspi/action.hpp"
#include "ogspi/reduce.hpp"

namespace ogspi {

// ---------------------------------------------------------------------------
// Environments: ordered association lists. Equality is up to permutation, so
// comparisons and printing go through a key-sorted view.

struct EnvEntry {
  enum class Sort : uint8_t {
    Value,  // x |-> V   (cbv), v |-> V (cbn)
    Cont,   // q |-> (E, p)
    TermB,  // x |-> M   (cbn only)
  };
  Sort sort;
  Name key;
  Term value;       // Value / TermB
  EvalContext ctx;  // Cont
  Name ret{};       // Cont: the continuation to restore
};

struct Environment {
  std::vector<EnvEntry> entries;

  const EnvEntry* lookup(const Name& n) const {
    for (const auto& e : entries)
      if (e.key == n) return &e;
    return nullptr;
  }
  Environment without(const Name& n) const {
    Environment out;
    for (const auto& e : entries)
      if (!(e.key == n)) out.entries.push_back(e);
    return out;
  }
  Environment with(EnvEntry e) const {
    Environment out = *this;
    if (lookup(e.key)) throw OgspiError("environment domain collision on " + to_string(e.key));
    out.entries.push_back(std::move(e));
    return out;
  }
  std::vector<Name> domain() const {
    std::vector<Name> out;
    for (const auto& e : entries) out.push_back(e.key);
    return out;
  }
};

inline EnvEntry value_entry(Name key, Term v) {
  return {EnvEntry::Sort::Value, key, std::move(v), {}, {}};
}
inline EnvEntry cont_entry(Name key, EvalContext e, Name ret) {
  return {EnvEntry::Sort::Cont, key, {}, std::move(e), ret};
}
inline EnvEntry termb_entry(Name key, Term m) {
  return {EnvEntry::Sort::TermB, key, std::move(m), {}, {}};
}

inline std::string to_string(const EnvEntry& e) {
  switch (e.sort) {
    case EnvEntry::Sort::Value:
    case EnvEntry::Sort::TermB:
      return to_string(e.key) + " |-> " + to_string(e.value);
    case EnvEntry::Sort::Cont:
      return to_string(e.key) + " |-> (" + to_string(e.ctx) + ", " + to_string(e.ret) + ")";
  }
  return "";
}

inline std::string to_string(const Environment& env) {
  std::vector<std::string> parts;
  for (const auto& e : env.entries) parts.push_back(to_string(e));
  std::sort(parts.begin(), parts.end());
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += " ; ";
    s += parts[i];
  }
  return s;
}

inline bool env_equal(const Environment& a, const Environment& b) {
  return to_string(a) == to_string(b);
}

// Continuation structure: the pairs (p, q) with gamma(p) = (E, q).
inline std::vector<std::pair<Name, Name>> continuation_structure(const Environment& env) {
  std::vector<std::pair<Name, Name>> cs;
  for (const auto& e : env.entries)
    if (e.sort == EnvEntry::Sort::Cont) cs.emplace_back(e.key, e.ret);
  std::sort(cs.begin(), cs.end());
  return cs;
}

// ---------------------------------------------------------------------------
// Configurations

// Alternating configurations <M,p,gamma,phi> / <gamma,phi> / <M>_phi.
struct AConfig {
  enum class Phase : uint8_t { Initial, Active, Passive };
  Phase phase{Phase::Initial};
  CalcMode mode{CalcMode::Cbv};
  Term term;  // Initial / Active
  Name cont;  // Active
  Environment env;
  NameSet support;

  static AConfig initial(Term m, CalcMode mode = CalcMode::Cbv) {
    AConfig f;
    f.phase = Phase::Initial;
    f.mode = mode;
    f.term = std::move(m);
    f.support = free_names(f.term);
    return f;
  }
};

// Stacked configurations for the well-bracketed LTS (cbv only).
struct SConfig {
  AConfig base;
  std::vector<Name> stack;  // top first; distinct Player continuation names

  static SConfig initial(Term m) { return {AConfig::initial(std::move(m)), {}}; }
};

// Concurrent configurations <A, gamma, phi>.
struct CConfig {
  bool initial{false};
  CalcMode mode{CalcMode::Cbv};
  Term init_term;  // when initial
  std::vector<std::pair<Name, Term>> threads;
  Environment env;
  NameSet support;

  static CConfig init(Term m, CalcMode mode = CalcMode::Cbv) {
    CConfig f;
    f.initial = true;
    f.mode = mode;
    f.init_term = std::move(m);
    f.support = free_names(f.init_term);
    return f;
  }
  static CConfig make(std::vector<std::pair<Name, Term>> threads, Environment env, NameSet phi,
                      CalcMode mode = CalcMode::Cbv) {
    CConfig f;
    f.mode = mode;
    f.threads = std::move(threads);
    f.env = std::move(env);
    f.support = std::move(phi);
    return f;
  }

  const Term* thread(const Name& p) const {
    for (const auto& t : threads)
      if (t.first == p) return &t.second;
    return nullptr;
  }
};

inline std::string to_string(const AConfig& f) {
  std::ostringstream os;
  os << "<";
  switch (f.phase) {
    case AConfig::Phase::Initial:
      os << "init " << to_string(f.term);
      break;
    case AConfig::Phase::Active:
      os << to_string(f.cont) << " |-> " << to_string(f.term);
      if (!f.env.entries.empty()) os << " ; " << to_string(f.env);
      break;
    case AConfig::Phase::Passive:
      os << to_string(f.env);
      break;
  }
  os << " | names:";
  for (const Name& n : f.support.items()) os << " " << to_string(n);
  os << ">";
  return os.str();
}

inline std::string to_string(const SConfig& f) {
  std::ostringstream os;
  std::string base = to_string(f.base);
  os << base.substr(0, base.size() - 1) << " | stack:";
  for (const Name& n : f.stack) os << " " << to_string(n);
  os << ">";
  return os.str();
}

inline std::string to_string(const CConfig& f) {
  std::ostringstream os;
  os << "<";
  if (f.initial) {
    os << "init " << to_string(f.init_term);
  } else {
    std::vector<std::string> parts;
    for (const auto& t : f.threads)
      parts.push_back(to_string(t.first) + " |-> " + to_string(t.second));
    std::sort(parts.begin(), parts.end());
    std::string envs = to_string(f.env);
    if (!envs.empty()) parts.push_back(envs);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) os << " ; ";
      os << parts[i];
    }
  }
  os << " | names:";
  for (const Name& n : f.support.items()) os << " " << to_string(n);
  os << ">";
  return os.str();
}

// ---------------------------------------------------------------------------
// Validity and polarity

inline NameSet env_free_names(const Environment& env) {
  NameSet out;
  for (const auto& e : env.entries) {
    switch (e.sort) {
      case EnvEntry::Sort::Value:
      case EnvEntry::Sort::TermB:
        out.add_all(free_names(e.value));
        break;
      case EnvEntry::Sort::Cont:
        out.add_all(free_names(e.ctx));
        out.add(e.ret);
        break;
    }
  }
  return out;
}

// Polarity: P-names are the environment domain (plus thread keys / the
// toplevel continuation where the flavor says so); O-names are the remaining
// available names. Answered continuation names drop out of the domain.
struct PolarityMap {
  std::map<Name, Polarity> map;

  friend bool operator==(const PolarityMap&, const PolarityMap&) = default;

  std::vector<Name> p_names() const {
    std::vector<Name> out;
    for (const auto& [n, pol] : map)
      if (pol == Polarity::P) out.push_back(n);
    return out;
  }
};

inline std::string to_string(const PolarityMap& pm) {
  std::string s;
  for (const auto& [n, pol] : pm.map)
    s += to_string(n) + (pol == Polarity::P ? ":P " : ":O ");
  return s;
}

namespace detail {
inline void polarity_common(const Environment& env, const NameSet& support, PolarityMap& pm) {
  for (const auto& e : env.entries) pm.map[e.key] = Polarity::P;
  NameSet o_conts;
  for (const auto& e : env.entries)
    if (e.sort == EnvEntry::Sort::Cont) o_conts.add(e.ret);
  for (const Name& n : support.items()) {
    if (pm.map.count(n)) continue;
    if (n.kind == NameKind::Continuation) {
      if (o_conts.contains(n)) pm.map[n] = Polarity::O;  // else answered: unavailable
    } else {
      pm.map[n] = Polarity::O;  // variables and value names stay available
    }
  }
}
}  // namespace detail

inline PolarityMap polarity_map(const AConfig& f) {
  PolarityMap pm;
  if (f.phase == AConfig::Phase::Initial) {
    for (const Name& n : f.support.items()) pm.map[n] = Polarity::O;
    return pm;
  }
  detail::polarity_common(f.env, f.support, pm);
  if (f.phase == AConfig::Phase::Active) pm.map[f.cont] = Polarity::O;  // toplevel
  return pm;
}

inline PolarityMap polarity_map(const CConfig& f) {
  PolarityMap pm;
  if (f.initial) {
    for (const Name& n : f.support.items()) pm.map[n] = Polarity::O;
    return pm;
  }
  detail::polarity_common(f.env, f.support, pm);
  for (const auto& t : f.threads) pm.map[t.first] = Polarity::P;  // running terms
  return pm;
}

inline PolarityMap polarity_map(const SConfig& f) { return polarity_map(f.base); }

struct InvalidConfiguration : OgspiError {
  using OgspiError::OgspiError;
};

inline void check_valid(const AConfig& f) {
  if (f.phase == AConfig::Phase::Initial) {
    NameSet fv = free_names(f.term);
    for (const Name& n : fv.items())
      if (!f.support.contains(n))
        throw InvalidConfiguration("initial support misses " + to_string(n));
    return;
  }
  for (const Name& n : f.env.domain())
    if (!f.support.contains(n))
      throw InvalidConfiguration("dom(gamma) not within the support: " + to_string(n));
  PolarityMap pm = polarity_map(f);
  auto check_oname = [&](const Name& n, const char* where) {
    auto it = pm.map.find(n);
    if (it == pm.map.end() || it->second != Polarity::O)
      throw InvalidConfiguration(std::string(where) + " name " + to_string(n) +
                                 " is not an O-name");
  };
  if (f.phase == AConfig::Phase::Active) {
    if (f.env.lookup(f.cont))
      throw InvalidConfiguration("toplevel continuation is in dom(gamma)");
    NameSet fv = free_names(f.term);
    for (const Name& n : fv.items()) check_oname(n, "term");
    check_oname(f.cont, "toplevel");
  }
  for (const auto& e : f.env.entries) {
    NameSet fn = e.sort == EnvEntry::Sort::Cont ? free_names(e.ctx) : free_names(e.value);
    if (e.sort == EnvEntry::Sort::Cont) fn.add(e.ret);
    for (const Name& n : fn.items()) check_oname(n, "environment");
  }
}

inline void check_valid(const SConfig& f) {
  check_valid(f.base);
  for (std::size_t i = 0; i < f.stack.size(); ++i) {
    const Name& n = f.stack[i];
    if (n.kind != NameKind::Continuation)
      throw InvalidConfiguration("stack entry is not a continuation name");
    const EnvEntry* e = f.base.env.lookup(n);
    if (!e || e->sort != EnvEntry::Sort::Cont)
      throw InvalidConfiguration("stack entry " + to_string(n) + " has no continuation entry");
    for (std::size_t j = i + 1; j < f.stack.size(); ++j)
      if (f.stack[j] == n) throw InvalidConfiguration("stack entries must be distinct");
  }
}

inline void check_valid(const CConfig& f) {
  if (f.initial) return;
  for (const auto& t : f.threads) {
    if (t.first.kind != NameKind::Continuation)
      throw InvalidConfiguration("thread key is not a continuation name");
    if (f.env.lookup(t.first))
      throw InvalidConfiguration("dom(A) and dom(gamma) must be disjoint");
  }
  for (const Name& n : f.env.domain())
    if (!f.support.contains(n))
      throw InvalidConfiguration("dom(gamma) not within the support: " + to_string(n));
}

// ---------------------------------------------------------------------------
// Fresh floors: action names must avoid everything occurring in the state.

inline FreshBase fresh_floor(const AConfig& f) {
  FreshBase base;
  base.raise_above(f.support);
  if (f.term) collect_all_names(f.term, base);
  base.raise_above(f.cont);
  for (const auto& e : f.env.entries) {
    base.raise_above(e.key);
    if (e.value) collect_all_names(e.value, base);
    for (const auto& fr : e.ctx) collect_all_names(fr.t, base);
    base.raise_above(e.ret);
  }
  return base;
}

inline FreshBase fresh_floor(const SConfig& f) {
  FreshBase base = fresh_floor(f.base);
  for (const Name& n : f.stack) base.raise_above(n);
  return base;
}

inline FreshBase fresh_floor(const CConfig& f) {
  FreshBase base;
  base.raise_above(f.support);
  if (f.init_term) collect_all_names(f.init_term, base);
  for (const auto& t : f.threads) {
    base.raise_above(t.first);
    collect_all_names(t.second, base);
  }
  for (const auto& e : f.env.entries) {
    base.raise_above(e.key);
    if (e.value) collect_all_names(e.value, base);
    for (const auto& fr : e.ctx) collect_all_names(fr.t, base);
    base.raise_above(e.ret);
  }
  return base;
}

// ---------------------------------------------------------------------------
// The Alternating OGS LTS (cbv and cbn, selected by the configuration mode)

struct ATransition {
  Action act;
  AConfig next;
};

inline std::vector<ATransition> aogs_transitions(const AConfig& f, const FreshBase& floor) {
  check_valid(f);
  std::vector<ATransition> out;
  const bool cbn = f.mode == CalcMode::Cbn;

  auto with_support = [](AConfig g, std::initializer_list<Name> fresh) {
    for (const Name& n : fresh) {
      if (g.support.contains(n)) throw InvalidConfiguration("bound name not fresh");
      g.support.add(n);
    }
    return g;
  };

  switch (f.phase) {
    case AConfig::Phase::Initial: {
      FreshBase base = floor;
      Name p = base.make(NameKind::Continuation);
      AConfig g = f;
      g.phase = AConfig::Phase::Active;
      g.cont = p;
      g.env = {};
      out.push_back({Action::abs({p}), with_support(std::move(g), {p})});
      return out;
    }
    case AConfig::Phase::Active: {
      Decomp d = cbn ? decompose_cbn(f.term) : decompose_cbv(f.term);
      if (d.head == Decomp::Head::Beta) {
        AConfig g = f;
        g.term = plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg));
        out.push_back({Action::tau(), std::move(g)});
        return out;
      }
      if (d.head == Decomp::Head::Value) {
        FreshBase base = floor;
        Name x = base.make(cbn ? NameKind::ValueName : NameKind::Variable);
        AConfig g = f;
        g.phase = AConfig::Phase::Passive;
        g.term = {};
        g.cont = {};
        g.env = f.env.with(value_entry(x, d.fun));
        out.push_back({Action::out(f.cont, {x}), with_support(std::move(g), {x})});
        return out;
      }
      if (d.head == Decomp::Head::StuckCall) {  // cbv PQ
        FreshBase base = floor;
        Name y = base.make(NameKind::Variable);
        Name q = base.make(NameKind::Continuation);
        AConfig g = f;
        g.phase = AConfig::Phase::Passive;
        g.term = {};
        g.cont = {};
        g.env = f.env.with(value_entry(y, d.arg)).with(cont_entry(q, d.ctx, f.cont));
        out.push_back({Action::out(d.fun->name, {y, q}), with_support(std::move(g), {y, q})});
        return out;
      }
      if (d.head == Decomp::Head::Callback) {  // cbn PVQ at a value name
        FreshBase base = floor;
        Name y = base.make(NameKind::Variable);
        Name q = base.make(NameKind::Continuation);
        AConfig g = f;
        g.phase = AConfig::Phase::Passive;
        g.term = {};
        g.cont = {};
        g.env = f.env.with(termb_entry(y, d.arg)).with(cont_entry(q, d.ctx, f.cont));
        out.push_back({Action::out(d.fun->name, {y, q}), with_support(std::move(g), {y, q})});
        return out;
      }
      if (d.head == Decomp::Head::TermStuck) {  // cbn PTQ at a variable
        FreshBase base = floor;
        Name q = base.make(NameKind::Continuation);
        AConfig g = f;
        g.phase = AConfig::Phase::Passive;
        g.term = {};
        g.cont = {};
        g.env = f.env.with(cont_entry(q, d.ctx, f.cont));
        out.push_back({Action::out(d.fun->name, {q}), with_support(std::move(g), {q})});
        return out;
      }
      throw InvalidConfiguration("active term is not reducible, a value, or a callback");
    }
    case AConfig::Phase::Passive: {
      for (const auto& e : f.env.entries) {
        FreshBase base = floor;
        switch (e.sort) {
          case EnvEntry::Sort::Cont: {  // OA: E is garbage-collected (cbv and cbn alike)
            Name x = base.make(cbn ? NameKind::ValueName : NameKind::Variable);
            AConfig g = f;
            g.phase = AConfig::Phase::Active;
            g.term = plug(e.ctx, cbn ? mk_valname(x) : mk_var(x));
            g.cont = e.ret;
            g.env = f.env.without(e.key);
            out.push_back({Action::in(e.key, {x}), with_support(std::move(g), {x})});
            break;
          }
          case EnvEntry::Sort::Value: {  // OQ (cbv, retained) / OVQ (cbn, consumed)
            Name y = base.make(NameKind::Variable);
            Name p = base.make(NameKind::Continuation);
            AConfig g = f;
            g.phase = AConfig::Phase::Active;
            g.term = mk_app(e.value, mk_var(y));
            g.cont = p;
            g.env = cbn ? f.env.without(e.key) : f.env;
            out.push_back({Action::in(e.key, {y, p}), with_support(std::move(g), {y, p})});
            break;
          }
          case EnvEntry::Sort::TermB: {  // OTQ (cbn, retained)
            Name p = base.make(NameKind::Continuation);
            AConfig g = f;
            g.phase = AConfig::Phase::Active;
            g.term = e.value;
            g.cont = p;
            out.push_back({Action::in(e.key, {p}), with_support(std::move(g), {p})});
            break;
          }
        }
      }
      return out;
    }
  }
  return out;
}

inline std::vector<ATransition> aogs_transitions(const AConfig& f) {
  return aogs_transitions(f, fresh_floor(f));
}

// ---------------------------------------------------------------------------
// The Concurrent OGS LTS

struct CTransition {
  Action act;
  CConfig next;
};

inline std::vector<CTransition> cogs_transitions(const CConfig& f, const FreshBase& floor,
                                                 bool all_taus = false) {
  check_valid(f);
  std::vector<CTransition> out;
  const bool cbn = f.mode == CalcMode::Cbn;

  auto with_support = [](CConfig g, std::initializer_list<Name> fresh) {
    for (const Name& n : fresh) {
      if (g.support.contains(n)) throw InvalidConfiguration("bound name not fresh");
      g.support.add(n);
    }
    return g;
  };

  if (f.initial) {
    FreshBase base = floor;
    Name p = base.make(NameKind::Continuation);
    CConfig g = f;
    g.initial = false;
    g.init_term = {};
    g.threads = {{p, f.init_term}};
    out.push_back({Action::abs({p}), with_support(std::move(g), {p})});
    return out;
  }

  auto drop_thread = [&](const Name& key) {
    std::vector<std::pair<Name, Term>> ts;
    for (const auto& t : f.threads)
      if (!(t.first == key)) ts.push_back(t);
    return ts;
  };

  // Silent steps are scheduled on the reducible thread with the smallest
  // continuation id; per-thread reduction is deterministic and threads are
  // independent, so this keeps the trace semantics intact (diamond-checked in
  // the test suite, where all_taus enables the exhaustive variant).
  std::optional<Name> tau_thread;
  if (!all_taus) {
    for (const auto& [p, m] : f.threads) {
      Decomp d = cbn ? decompose_cbn(m) : decompose_cbv(m);
      if (d.head == Decomp::Head::Beta && (!tau_thread || p.id < tau_thread->id)) tau_thread = p;
    }
  }

  for (const auto& [p, m] : f.threads) {
    Decomp d = cbn ? decompose_cbn(m) : decompose_cbv(m);
    FreshBase base = floor;
    switch (d.head) {
      case Decomp::Head::Beta: {
        if (tau_thread && !(p == *tau_thread)) break;
        CConfig g = f;
        for (auto& t : g.threads)
          if (t.first == p) t.second = plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg));
        out.push_back({Action::tau(), std::move(g)});
        break;
      }
      case Decomp::Head::Value: {
        Name x = base.make(cbn ? NameKind::ValueName : NameKind::Variable);
        CConfig g = f;
        g.threads = drop_thread(p);
        g.env = f.env.with(value_entry(x, d.fun));
        out.push_back({Action::out(p, {x}), with_support(std::move(g), {x})});
        break;
      }
      case Decomp::Head::StuckCall: {
        Name y = base.make(NameKind::Variable);
        Name q = base.make(NameKind::Continuation);
        CConfig g = f;
        g.threads = drop_thread(p);
        g.env = f.env.with(value_entry(y, d.arg)).with(cont_entry(q, d.ctx, p));
        out.push_back({Action::out(d.fun->name, {y, q}), with_support(std::move(g), {y, q})});
        break;
      }
      case Decomp::Head::Callback: {
        Name y = base.make(NameKind::Variable);
        Name q = base.make(NameKind::Continuation);
        CConfig g = f;
        g.threads = drop_thread(p);
        g.env = f.env.with(termb_entry(y, d.arg)).with(cont_entry(q, d.ctx, p));
        out.push_back({Action::out(d.fun->name, {y, q}), with_support(std::move(g), {y, q})});
        break;
      }
      case Decomp::Head::TermStuck: {
        Name q = base.make(NameKind::Continuation);
        CConfig g = f;
        g.threads = drop_thread(p);
        g.env = f.env.with(cont_entry(q, d.ctx, p));
        out.push_back({Action::out(d.fun->name, {q}), with_support(std::move(g), {q})});
        break;
      }
      default:
        throw InvalidConfiguration("thread is stuck in an unexpected way");
    }
  }

  for (const auto& e : f.env.entries) {
    FreshBase base = floor;
    switch (e.sort) {
      case EnvEntry::Sort::Cont: {  // OA consumes the entry and spawns a thread
        Name x = base.make(cbn ? NameKind::ValueName : NameKind::Variable);
        CConfig g = f;
        g.env = f.env.without(e.key);
        g.threads.push_back({e.ret, plug(e.ctx, cbn ? mk_valname(x) : mk_var(x))});
        out.push_back({Action::in(e.key, {x}), with_support(std::move(g), {x})});
        break;
      }
      case EnvEntry::Sort::Value: {  // OQ retained (cbv); OVQ consumed (cbn)
        Name y = base.make(NameKind::Variable);
        Name p = base.make(NameKind::Continuation);
        CConfig g = f;
        if (cbn) g.env = f.env.without(e.key);
        g.threads.push_back({p, mk_app(e.value, mk_var(y))});
        out.push_back({Action::in(e.key, {y, p}), with_support(std::move(g), {y, p})});
        break;
      }
      case EnvEntry::Sort::TermB: {  // OTQ retained
        Name p = base.make(NameKind::Continuation);
        CConfig g = f;
        g.threads.push_back({p, e.value});
        out.push_back({Action::in(e.key, {p}), with_support(std::move(g), {p})});
        break;
      }
    }
  }
  return out;
}

inline std::vector<CTransition> cogs_transitions(const CConfig& f) {
  return cogs_transitions(f, fresh_floor(f));
}

// ---------------------------------------------------------------------------
// The Well-Bracketed OGS LTS. PQ pushes its fresh continuation name; OA is
// enabled only at the top of the stack and pops it; the continuation entry is
// retained in gamma. Only the cbv flavor exists.

struct STransition {
  Action act;
  SConfig next;
};

inline std::vector<STransition> wbogs_transitions(const SConfig& f, const FreshBase& floor) {
  check_valid(f);
  if (f.base.mode != CalcMode::Cbv)
    throw InvalidConfiguration("the well-bracketed LTS is cbv-only");
  std::vector<STransition> out;

  if (f.base.phase != AConfig::Phase::Passive) {
    // Initial and active transitions follow AOGS, except that PQ pushes.
    for (ATransition& t : aogs_transitions(f.base, floor)) {
      SConfig g{std::move(t.next), f.stack};
      if (t.act.dir == ActDir::Out && t.act.subject.kind == NameKind::Variable)
        g.stack.insert(g.stack.begin(), t.act.objects[1]);  // PQ: push q
      out.push_back({std::move(t.act), std::move(g)});
    }
    return out;
  }

  for (const auto& e : f.base.env.entries) {
    FreshBase base = floor;
    switch (e.sort) {
      case EnvEntry::Sort::Cont: {
        // OA only with the subject on top of the stack; the entry is kept.
        if (f.stack.empty() || !(f.stack.front() == e.key)) break;
        Name x = base.make(NameKind::Variable);
        AConfig g = f.base;
        g.phase = AConfig::Phase::Active;
        g.term = plug(e.ctx, mk_var(x));
        g.cont = e.ret;
        if (g.support.contains(x)) throw InvalidConfiguration("bound name not fresh");
        g.support.add(x);
        SConfig sg{std::move(g), {f.stack.begin() + 1, f.stack.end()}};
        out.push_back({Action::in(e.key, {x}), std::move(sg)});
        break;
      }
      case EnvEntry::Sort::Value: {
        Name y = base.make(NameKind::Variable);
        Name p = base.make(NameKind::Continuation);
        AConfig g = f.base;
        g.phase = AConfig::Phase::Active;
        g.term = mk_app(e.value, mk_var(y));
        g.cont = p;
        if (g.support.contains(y) || g.support.contains(p))
          throw InvalidConfiguration("bound name not fresh");
        g.support.add(y);
        g.support.add(p);
        SConfig sg{std::move(g), f.stack};
        out.push_back({Action::in(e.key, {y, p}), std::move(sg)});
        break;
      }
      default:
        throw InvalidConfiguration("cbn entries cannot appear in stacked configurations");
    }
  }
  return out;
}

inline std::vector<STransition> wbogs_transitions(const SConfig& f) {
  return wbogs_transitions(f, fresh_floor(f));
}

inline AConfig erase_stack(const SConfig& f) { return f.base; }

// ---------------------------------------------------------------------------
// Pushdown acceptance and full stacks

struct MissingContinuationEntry : OgspiError {
  using OgspiError::OgspiError;
};

// Full stack: toplevel continuation (when active), then the stack's Player
// names interleaved with the names their entries return to.
inline std::vector<Name> full_stack(const SConfig& f) {
  std::vector<Name> out;
  if (f.base.phase == AConfig::Phase::Active) out.push_back(f.base.cont);
  for (const Name& p : f.stack) {
    const EnvEntry* e = f.base.env.lookup(p);
    if (!e || e->sort != EnvEntry::Sort::Cont)
      throw MissingContinuationEntry("no continuation entry for stack name " + to_string(p));
    out.push_back(p);
    out.push_back(e->ret);
  }
  return out;
}

// Fold a visible trace over the pushdown: IOQ, OQ and PQ push their fresh
// continuation name; PA and OA pop, requiring a top match. Returns the final
// stack, or nullopt on violation.
inline std::optional<std::vector<Name>> pushdown_accepts(const Trace& t,
                                                         std::vector<Name> stack) {
  for (const Action& a : t) {
    switch (a.dir) {
      case ActDir::Tau:
        continue;
      case ActDir::Abs:
        for (const Name& n : a.objects)
          if (n.kind == NameKind::Continuation) stack.insert(stack.begin(), n);
        continue;
      case ActDir::Out:
      case ActDir::In:
        if (a.subject.kind == NameKind::Continuation) {  // an answer: pop with match
          if (stack.empty() || !(stack.front() == a.subject)) return std::nullopt;
          stack.erase(stack.begin());
        } else {  // a question: push the fresh continuation name(s)
          for (const Name& n : a.objects)
            if (n.kind == NameKind::Continuation) stack.insert(stack.begin(), n);
        }
        continue;
    }
  }
  return stack;
}

// ---------------------------------------------------------------------------
// Strongly passive configurations and complete traces

// Initial configurations count as passive (with an empty environment), so
// they are strongly passive.
inline bool is_strongly_passive(const AConfig& f) {
  if (f.phase == AConfig::Phase::Active) return false;
  for (const auto& e : f.env.entries)
    if (e.sort == EnvEntry::Sort::Cont) return false;
  return true;
}

// Popped OA entries stay in gamma for uniformity, but they are dead: the live
// continuation structure of a stacked configuration is its stack.
inline bool is_strongly_passive(const SConfig& f) {
  return f.base.phase != AConfig::Phase::Active && f.stack.empty();
}

inline bool is_strongly_passive(const CConfig& f) {
  if (f.initial) return true;
  if (!f.threads.empty()) return false;
  for (const auto& e : f.env.entries)
    if (e.sort == EnvEntry::Sort::Cont) return false;
  return true;
}

// Player continuation names in the completeness sense: environment
// continuation entries plus the toplevel / thread keys.
inline std::vector<Name> player_cont_names(const AConfig& f) {
  std::vector<Name> out;
  if (f.phase == AConfig::Phase::Active) out.push_back(f.cont);
  for (const auto& e : f.env.entries)
    if (e.sort == EnvEntry::Sort::Cont) out.push_back(e.key);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Name> player_cont_names(const CConfig& f) {
  std::vector<Name> out;
  for (const auto& t : f.threads) out.push_back(t.first);
  for (const auto& e : f.env.entries)
    if (e.sort == EnvEntry::Sort::Cont) out.push_back(e.key);
  std::sort(out.begin(), out.end());
  return out;
}

// The subject names of the unjustified answers in t must be exactly the
// Player continuation names of the start configuration.
namespace detail {
inline bool complete_by_justification(const Trace& t, std::vector<Name> expected) {
  auto just = justifiers(t);
  std::vector<Name> unj;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i].is_answer() && !just[i]) unj.push_back(t[i].subject);
  // every question must be answered
  std::map<Name, bool> answered;
  for (const Action& a : t) {
    if (a.dir == ActDir::Tau) continue;
    for (const Name& n : a.objects)
      if (n.kind == NameKind::Continuation) answered[n] = false;
    if (a.is_answer()) {
      auto it = answered.find(a.subject);
      if (it != answered.end()) it->second = true;
    }
  }
  for (const auto& [n, ok] : answered)
    if (!ok) return false;
  std::sort(unj.begin(), unj.end());
  return unj == expected;
}
}  // namespace detail

inline bool is_complete_trace(const Trace& t, const AConfig& f) {
  std::vector<Name> expected =
      f.phase == AConfig::Phase::Initial ? std::vector<Name>{} : player_cont_names(f);
  return detail::complete_by_justification(t, std::move(expected));
}

inline bool is_complete_trace(const Trace& t, const CConfig& f) {
  std::vector<Name> expected = f.initial ? std::vector<Name>{} : player_cont_names(f);
  return detail::complete_by_justification(t, std::move(expected));
}

inline bool is_complete_trace(const Trace& t, const SConfig& f) {
  auto res = pushdown_accepts(t, full_stack(f));
  return res && res->empty();
}

// ---------------------------------------------------------------------------
// Compatibility, support equivalence, tensor products

inline bool compatible(const PolarityMap& a, const PolarityMap& b) {
  for (const auto& [n, pol] : a.map) {
    auto it = b.map.find(n);
    if (it != b.map.end() && it->second != pol) return false;
  }
  return true;
}

inline bool compatible(const AConfig& f, const AConfig& g) {
  return compatible(polarity_map(f), polarity_map(g));
}
inline bool compatible(const CConfig& f, const CConfig& g) {
  return compatible(polarity_map(f), polarity_map(g));
}
inline bool compatible(const SConfig& f, const SConfig& g) {
  for (const Name& n : f.stack)
    for (const Name& m : g.stack)
      if (n == m) return false;
  return compatible(f.base, g.base);
}

inline bool support_equivalent(const AConfig& f, const AConfig& g) {
  return polarity_map(f) == polarity_map(g) &&
         continuation_structure(f.env) == continuation_structure(g.env) &&
         f.phase == g.phase && (f.phase != AConfig::Phase::Active || f.cont == g.cont);
}

inline bool support_equivalent(const CConfig& f, const CConfig& g) {
  auto thread_keys = [](const CConfig& c) {
    std::vector<Name> ks;
    for (const auto& t : c.threads) ks.push_back(t.first);
    std::sort(ks.begin(), ks.end());
    return ks;
  };
  return polarity_map(f) == polarity_map(g) && thread_keys(f) == thread_keys(g) &&
         continuation_structure(f.env) == continuation_structure(g.env);
}

inline bool support_equivalent(const SConfig& f, const SConfig& g) {
  return support_equivalent(f.base, g.base) && f.stack == g.stack;
}

struct IncompatibleConfigurations : OgspiError {
  using OgspiError::OgspiError;
};
struct InvalidInterleaving : OgspiError {
  using OgspiError::OgspiError;
};

namespace detail {
inline Environment merge_envs(const Environment& a, const Environment& b) {
  Environment out = a;
  for (const auto& e : b.entries) out = out.with(e);
  return out;
}
}  // namespace detail

inline CConfig tensor(const CConfig& f, const CConfig& g) {
  if (f.initial || g.initial)
    throw IncompatibleConfigurations("initial configurations cannot be tensored");
  if (f.mode != g.mode) throw IncompatibleConfigurations("calculus modes differ");
  if (!compatible(f, g)) throw IncompatibleConfigurations("polarity functions disagree");
  CConfig out;
  out.mode = f.mode;
  out.threads = f.threads;
  for (const auto& t : g.threads) {
    if (out.thread(t.first)) throw IncompatibleConfigurations("running terms overlap");
    out.threads.push_back(t);
  }
  out.env = detail::merge_envs(f.env, g.env);
  out.support = f.support;
  out.support.add_all(g.support);
  check_valid(out);
  return out;
}

inline AConfig tensor(const AConfig& f, const AConfig& g) {
  if (f.phase == AConfig::Phase::Initial || g.phase == AConfig::Phase::Initial)
    throw IncompatibleConfigurations("initial configurations cannot be tensored");
  if (f.mode != g.mode) throw IncompatibleConfigurations("calculus modes differ");
  if (f.phase == AConfig::Phase::Active && g.phase == AConfig::Phase::Active)
    throw IncompatibleConfigurations("at most one side may be active");
  if (!compatible(f, g)) throw IncompatibleConfigurations("polarity functions disagree");
  const AConfig& act = f.phase == AConfig::Phase::Active ? f : g;
  AConfig out;
  out.mode = f.mode;
  out.phase = act.phase == AConfig::Phase::Active ? AConfig::Phase::Active
                                                  : AConfig::Phase::Passive;
  if (out.phase == AConfig::Phase::Active) {
    out.term = act.term;
    out.cont = act.cont;
  }
  out.env = detail::merge_envs(f.env, g.env);
  out.support = f.support;
  out.support.add_all(g.support);
  check_valid(out);
  return out;
}

inline bool is_interleaving(const std::vector<Name>& s, const std::vector<Name>& a,
                            const std::vector<Name>& b) {
  if (s.size() != a.size() + b.size()) return false;
  // names are distinct, so membership decides the split
  std::size_t i = 0, j = 0;
  for (const Name& n : s) {
    if (i < a.size() && a[i] == n) {
      ++i;
    } else if (j < b.size() && b[j] == n) {
      ++j;
    } else {
      return false;
    }
  }
  return i == a.size() && j == b.size();
}

inline SConfig tensor(const SConfig& f, const SConfig& g, const std::vector<Name>& sigma) {
  if (!is_interleaving(sigma, f.stack, g.stack))
    throw InvalidInterleaving("sigma is not an interleaving of the two stacks");
  SConfig out{tensor(f.base, g.base), sigma};
  check_valid(out);
  return out;
}

// ---------------------------------------------------------------------------
// Renaming of configuration names (used to align bisimulation answers with
// the challenge's bound names; targets are always fresh for the state).

inline Name renamed(const Name& n, const std::map<Name, Name>& m) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

inline EvalContext ctx_rename(const EvalContext& e, const std::map<Name, Name>& m) {
  EvalContext out = e;
  for (auto& f : out) f.t = term_rename(f.t, m);
  return out;
}

inline Environment env_rename(const Environment& env, const std::map<Name, Name>& m) {
  Environment out = env;
  for (auto& e : out.entries) {
    e.key = renamed(e.key, m);
    if (e.value) e.value = term_rename(e.value, m);
    e.ctx = ctx_rename(e.ctx, m);
    e.ret = renamed(e.ret, m);
  }
  return out;
}

inline NameSet names_rename(const NameSet& s, const std::map<Name, Name>& m) {
  NameSet out;
  for (const Name& n : s.items()) out.add(renamed(n, m));
  return out;
}

inline AConfig config_rename(const AConfig& f, const std::map<Name, Name>& m) {
  AConfig out = f;
  if (out.term) out.term = term_rename(out.term, m);
  out.cont = renamed(out.cont, m);
  out.env = env_rename(out.env, m);
  out.support = names_rename(out.support, m);
  return out;
}

inline SConfig config_rename(const SConfig& f, const std::map<Name, Name>& m) {
  SConfig out{config_rename(f.base, m), f.stack};
  for (Name& n : out.stack) n = renamed(n, m);
  return out;
}

inline CConfig config_rename(const CConfig& f, const std::map<Name, Name>& m) {
  CConfig out = f;
  if (out.init_term) out.init_term = term_rename(out.init_term, m);
  for (auto& t : out.threads) {
    t.first = renamed(t.first, m);
    t.second = term_rename(t.second, m);
  }
  out.env = env_rename(out.env, m);
  out.support = names_rename(out.support, m);
  return out;
}

// Split a concurrent configuration into one singleton per P-name, each over
// the shared O-name support. Tensoring the results in order re-yields F.
inline std::vector<CConfig> decompose_singletons(const CConfig& f) {
  check_valid(f);
  NameSet o_support = f.support;
  NameSet pnames;
  for (const auto& t : f.threads) pnames.add(t.first);
  for (const auto& e : f.env.entries) pnames.add(e.key);
  NameSet shared;
  for (const Name& n : f.support.items())
    if (!pnames.contains(n)) shared.add(n);

  std::vector<CConfig> out;
  for (const auto& t : f.threads) {
    CConfig c;
    c.mode = f.mode;
    c.threads = {t};
    c.support = shared;
    c.support.add(t.first);
    out.push_back(std::move(c));
  }
  for (const auto& e : f.env.entries) {
    CConfig c;
    c.mode = f.mode;
    c.env.entries = {e};
    c.support = shared;
    c.support.add(e.key);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace ogspi
