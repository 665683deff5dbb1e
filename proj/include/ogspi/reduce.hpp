#pragma once

#include <optional>
#include <variant>

#include "ogspi/term.hpp"

namespace ogspi {

// Evaluation contexts as frame lists, outermost frame first.
//   FunVal V : the context V [.]   (CBV only)
//   ArgTerm M: the context [.] M
struct Frame {
  enum class Kind : uint8_t { FunVal, ArgTerm } kind;
  Term t;
};
using EvalContext = std::vector<Frame>;

inline Term plug(const EvalContext& ctx, Term hole) {
  Term r = std::move(hole);
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    r = it->kind == Frame::Kind::FunVal ? mk_app(it->t, r) : mk_app(r, it->t);
  return r;
}

inline std::string to_string(const EvalContext& ctx) {
  Term hole = mk_var(Name{NameKind::Variable, -1});
  std::string s = to_string(plug(ctx, hole));
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 3, "x-1") == 0) {
      out += "[]";
      i += 3;
    } else {
      out += s[i++];
    }
  }
  return out;
}

inline NameSet free_names(const EvalContext& ctx) {
  NameSet out;
  std::vector<Name> bound;
  for (const auto& f : ctx) collect_free_names(f.t, bound, out);
  return out;
}

// Capture-avoiding substitution M{x := R}. Binder renaming draws fresh names
// above everything occurring in M and R, so results are deterministic.
namespace detail {
inline Term subst_rec(const Term& t, const Name& x, const Term& r, FreshBase& base) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      return t->name == x ? r : t;
    case TermKind::Lam: {
      if (t->name == x) return t;  // shadowed
      if (free_names(r).contains(t->name)) {
        Name y = base.make(NameKind::Variable);
        Term body = subst_rec(t->a, t->name, mk_var(y), base);
        return mk_lam(y, subst_rec(body, x, r, base));
      }
      return mk_lam(t->name, subst_rec(t->a, x, r, base));
    }
    case TermKind::App:
      return mk_app(subst_rec(t->a, x, r, base), subst_rec(t->b, x, r, base));
    case TermKind::RhoNew: {
      Store s;
      for (const auto& e : t->store.entries) s.put(e.loc, subst_rec(e.value, x, r, base));
      return mk_rho(std::move(s), subst_rec(t->a, x, r, base));
    }
    case TermKind::Assign:
      return mk_assign(t->loc, subst_rec(t->a, x, r, base), subst_rec(t->b, x, r, base));
    case TermKind::Deref:
      return t;
  }
  return t;
}
}  // namespace detail

inline Term subst(const Term& t, const Name& x, const Term& r) {
  FreshBase base;
  collect_all_names(t, base);
  collect_all_names(r, base);
  return detail::subst_rec(t, x, r, base);
}

// ---------------------------------------------------------------------------
// Decomposition

struct Decomp {
  enum class Head : uint8_t {
    Value,      // the whole term is a value (ctx empty)
    Beta,       // ctx[ (\x.M) R ]  (R a value for CBV/rho, any term for CBN)
    StuckCall,  // ctx[ x V ]       eager normal form with a free head variable
    TermStuck,  // ctx[ x ]         CBN normal form E[x]
    Callback,   // ctx[ v M ]       CBN normal form E[v M]
    Deref,      // ctx[ !l ]
    Assign,     // ctx[ l := V; M ]
    RhoAlloc,   // ctx[ rho S. M ]
  };
  Head head;
  EvalContext ctx;
  Term fun;   // Beta: the lambda; StuckCall: Var x; Callback: ValName v
  Term arg;   // Beta/StuckCall/Callback: the argument
  Term node;  // Deref/Assign/RhoAlloc: the redex site
};

// CBV (and rho) decomposition: the function is run before the argument.
inline Decomp decompose_cbv(const Term& t, CalcMode mode = CalcMode::Cbv) {
  EvalContext ctx;
  Term cur = t;
  while (true) {
    if (is_value(cur, mode)) return {Decomp::Head::Value, std::move(ctx), cur, {}, {}};
    switch (cur->kind) {
      case TermKind::App: {
        const Term& f = cur->a;
        const Term& a = cur->b;
        if (!is_value(f, mode)) {
          ctx.push_back({Frame::Kind::ArgTerm, a});
          cur = f;
          break;
        }
        if (!is_value(a, mode)) {
          ctx.push_back({Frame::Kind::FunVal, f});
          cur = a;
          break;
        }
        if (f->kind == TermKind::Lam)
          return {Decomp::Head::Beta, std::move(ctx), f, a, cur};
        return {Decomp::Head::StuckCall, std::move(ctx), f, a, cur};
      }
      case TermKind::Deref:
        return {Decomp::Head::Deref, std::move(ctx), {}, {}, cur};
      case TermKind::Assign:
        return {Decomp::Head::Assign, std::move(ctx), {}, {}, cur};
      case TermKind::RhoNew:
        return {Decomp::Head::RhoAlloc, std::move(ctx), {}, {}, cur};
      default:
        throw OgspiError("malformed term in cbv decomposition: " + to_string(cur));
    }
  }
}

// CBN decomposition: contexts are E M frames only.
inline Decomp decompose_cbn(const Term& t) {
  EvalContext ctx;
  Term cur = t;
  while (true) {
    switch (cur->kind) {
      case TermKind::Lam:
      case TermKind::ValName: {
        if (ctx.empty()) return {Decomp::Head::Value, {}, cur, {}, {}};
        Frame inner = ctx.back();
        if (cur->kind == TermKind::Lam) {
          ctx.pop_back();
          return {Decomp::Head::Beta, std::move(ctx), cur, inner.t, {}};
        }
        ctx.pop_back();
        return {Decomp::Head::Callback, std::move(ctx), cur, inner.t, {}};
      }
      case TermKind::Var:
        return {Decomp::Head::TermStuck, std::move(ctx), cur, {}, {}};
      case TermKind::App:
        ctx.push_back({Frame::Kind::ArgTerm, cur->b});
        cur = cur->a;
        break;
      default:
        throw OgspiError("malformed term in cbn decomposition: " + to_string(cur));
    }
  }
}

// ---------------------------------------------------------------------------
// Small-step reduction

inline std::optional<Term> step_cbv(const Term& t) {
  Decomp d = decompose_cbv(t);
  if (d.head != Decomp::Head::Beta) return std::nullopt;
  return plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg));
}

inline std::optional<Term> step_cbn(const Term& t) {
  Decomp d = decompose_cbn(t);
  if (d.head != Decomp::Head::Beta) return std::nullopt;
  return plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg));
}

struct EnfValue {
  Term value;
};
struct EnfStuck {
  EvalContext ctx;
  Name head;
  Term arg;
};
struct FuelExhausted {};
using EnfResult = std::variant<EnfValue, EnfStuck, FuelExhausted>;

// Iterate step_cbv up to `fuel` reductions. Absence of a successor is a
// normal outcome; fuel exhaustion only signals *suspected* divergence.
inline EnfResult eval_enf(Term t, int fuel) {
  for (int i = 0;; ++i) {
    Decomp d = decompose_cbv(t);
    if (d.head == Decomp::Head::Value) return EnfValue{d.fun};
    if (d.head == Decomp::Head::StuckCall) return EnfStuck{std::move(d.ctx), d.fun->name, d.arg};
    if (i >= fuel) return FuelExhausted{};
    t = plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg));
  }
}

// ---------------------------------------------------------------------------
// rho-calculus stepping

struct RhoState {
  Term term;
  Store store;
};

struct RhoStuckDeref {
  Loc loc;
};
struct RhoStuckAssign {
  Loc loc;
};
struct RhoNormal {};  // value or stuck call: an eager normal form
using RhoStepError = std::variant<RhoStuckDeref, RhoStuckAssign>;

struct RhoStepResult {
  std::optional<RhoState> next;        // present when a reduction fired
  std::optional<RhoStepError> stuck;   // present on a stuck deref/assign
};

namespace detail {
inline Term rename_locs(const Term& t, const std::map<Loc, Loc>& m) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      return t;
    case TermKind::Lam:
      return mk_lam(t->name, rename_locs(t->a, m));
    case TermKind::App:
      return mk_app(rename_locs(t->a, m), rename_locs(t->b, m));
    case TermKind::Deref: {
      auto it = m.find(t->loc);
      return it == m.end() ? t : mk_deref(it->second);
    }
    case TermKind::Assign: {
      auto it = m.find(t->loc);
      Loc l = it == m.end() ? t->loc : it->second;
      return mk_assign(l, rename_locs(t->a, m), rename_locs(t->b, m));
    }
    case TermKind::RhoNew: {
      // inner rho entries shadow by location identity
      std::map<Loc, Loc> inner = m;
      for (const auto& e : t->store.entries) inner.erase(e.loc);
      Store s;
      for (const auto& e : t->store.entries) s.put(e.loc, rename_locs(e.value, inner));
      return mk_rho(std::move(s), rename_locs(t->a, inner));
    }
  }
  return t;
}
}  // namespace detail

inline RhoStepResult step_rho(const Term& t, const Store& store) {
  Decomp d = decompose_cbv(t, CalcMode::Rho);
  switch (d.head) {
    case Decomp::Head::Value:
    case Decomp::Head::StuckCall:
      return {};
    case Decomp::Head::Beta:
      return {RhoState{plug(d.ctx, subst(d.fun->a, d.fun->name, d.arg)), store}, std::nullopt};
    case Decomp::Head::Deref: {
      const Term* v = store.lookup(d.node->loc);
      if (!v) return {std::nullopt, RhoStepError{RhoStuckDeref{d.node->loc}}};
      return {RhoState{plug(d.ctx, *v), store}, std::nullopt};
    }
    case Decomp::Head::Assign: {
      if (!store.contains(d.node->loc))
        return {std::nullopt, RhoStepError{RhoStuckAssign{d.node->loc}}};
      Store s = store;
      s.put(d.node->loc, d.node->a);
      return {RhoState{plug(d.ctx, d.node->b), s}, std::nullopt};
    }
    case Decomp::Head::RhoAlloc: {
      // alpha-rename the allocated domain away from dom(S), the locations of
      // S's values, of E, and of the allocation itself
      std::set<Loc> used = locations(store);
      for (const auto& f : d.ctx) {
        auto ls = locations(f.t);
        used.insert(ls.begin(), ls.end());
      }
      auto own = locations(d.node);
      used.insert(own.begin(), own.end());
      int next = used.empty() ? 0 : used.rbegin()->id + 1;
      std::map<Loc, Loc> ren;
      for (const auto& e : d.node->store.entries) ren[e.loc] = Loc{next++};
      Store s = store;
      for (const auto& e : d.node->store.entries)
        s.put(ren.at(e.loc), detail::rename_locs(e.value, ren));
      return {RhoState{plug(d.ctx, detail::rename_locs(d.node->a, ren)), s}, std::nullopt};
    }
    default:
      return {};
  }
}

struct RhoEvalResult {
  enum class Outcome : uint8_t { Normal, StuckDeref, StuckAssign, FuelExhausted } outcome;
  RhoState state;
};

inline RhoEvalResult eval_rho(Term t, Store s, int fuel) {
  for (int i = 0;; ++i) {
    RhoStepResult r = step_rho(t, s);
    if (r.stuck) {
      auto out = std::holds_alternative<RhoStuckDeref>(*r.stuck)
                     ? RhoEvalResult::Outcome::StuckDeref
                     : RhoEvalResult::Outcome::StuckAssign;
      return {out, {t, s}};
    }
    if (!r.next) return {RhoEvalResult::Outcome::Normal, {t, s}};
    if (i >= fuel) return {RhoEvalResult::Outcome::FuelExhausted, {t, s}};
    t = r.next->term;
    s = r.next->store;
  }
}

}  // namespace ogspi
