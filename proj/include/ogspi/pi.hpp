#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ogspi/action.hpp"
#include "ogspi/names.hpp"
#include "ogspi/parse.hpp"

namespace ogspi {

// Internal pi-calculus agents. All outputs are bound; every tuple is made of
// pairwise distinct names. Forwarders are constants so that states stay small
// and recursion goes through the defining-equation table.
enum class PiKind : uint8_t { Nil, Input, Output, RepInput, Res, Par, ConstApp };

enum class PiConst : uint8_t {
  FwdCbvCont,  // (p,q) p(x). q^(y). FwdCbvVar<y,x>
  FwdCbvVar,   // (x,y) !x(z,p). y^(w,q). (FwdCbvCont<q,p> | FwdCbvVar<w,z>)
  FwdCbnVar,   // (x,y) !x(p). y^(q). FwdCbnCont<q,p>
  FwdCbnCont,  // (p,q) p(v). q^(w). FwdCbnVal<w,v>
  FwdCbnVal,   // (v,w) v(x,p). w^(y,q). (FwdCbnVar<y,x> | FwdCbnCont<q,p>)
};

struct PiNode;
using Pi = std::shared_ptr<const PiNode>;

struct PiNode {
  PiKind kind{PiKind::Nil};
  Name subject{};             // Input/Output/RepInput
  std::vector<Name> binders;  // prefix payload; Res: single restricted name
  Pi left, right;             // Par; prefix/Res body in left
  PiConst cst{};              // ConstApp
  std::vector<Name> args;     // ConstApp
};

inline Pi pi_nil() {
  static Pi nil = std::make_shared<PiNode>();
  return nil;
}

inline Pi pi_input(Name subj, std::vector<Name> params, Pi body, bool replicated = false) {
  auto n = std::make_shared<PiNode>();
  n->kind = replicated ? PiKind::RepInput : PiKind::Input;
  n->subject = subj;
  n->binders = std::move(params);
  n->left = std::move(body);
  return n;
}

inline Pi pi_output(Name subj, std::vector<Name> payload, Pi body) {
  auto n = std::make_shared<PiNode>();
  n->kind = PiKind::Output;
  n->subject = subj;
  n->binders = std::move(payload);
  n->left = std::move(body);
  return n;
}

inline Pi pi_res(Name x, Pi body) {
  auto n = std::make_shared<PiNode>();
  n->kind = PiKind::Res;
  n->binders = {x};
  n->left = std::move(body);
  return n;
}

inline Pi pi_res(const std::vector<Name>& xs, Pi body) {
  Pi r = std::move(body);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) r = pi_res(*it, r);
  return r;
}

inline Pi pi_par(Pi l, Pi r) {
  if (l->kind == PiKind::Nil) return r;
  if (r->kind == PiKind::Nil) return l;
  auto n = std::make_shared<PiNode>();
  n->kind = PiKind::Par;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

inline Pi pi_const(PiConst c, std::vector<Name> args) {
  auto n = std::make_shared<PiNode>();
  n->kind = PiKind::ConstApp;
  n->cst = c;
  n->args = std::move(args);
  return n;
}

// Abstractions (x~)P; name-closed when used as a constant definition.
struct PiAbs {
  std::vector<Name> params;
  Pi body;
};

inline const char* const_name(PiConst c) {
  switch (c) {
    case PiConst::FwdCbvCont: return "fwk";
    case PiConst::FwdCbvVar: return "fwv";
    case PiConst::FwdCbnVar: return "nfwx";
    case PiConst::FwdCbnCont: return "nfwk";
    case PiConst::FwdCbnVal: return "nfwv";
  }
  return "?";
}

// Defining equations. Bodies are name-closed; ids 0/1 are the parameters.
inline const PiAbs& const_def(PiConst c) {
  auto def = [](PiConst cc) -> PiAbs {
    Name a0, a1;
    switch (cc) {
      case PiConst::FwdCbvCont: {
        a0 = {NameKind::Continuation, 0};
        a1 = {NameKind::Continuation, 1};
        Name x{NameKind::Variable, 2}, y{NameKind::Variable, 3};
        return {{a0, a1},
                pi_input(a0, {x}, pi_output(a1, {y}, pi_const(PiConst::FwdCbvVar, {y, x})))};
      }
      case PiConst::FwdCbvVar: {
        a0 = {NameKind::Variable, 0};
        a1 = {NameKind::Variable, 1};
        Name z{NameKind::Variable, 2}, p{NameKind::Continuation, 2};
        Name w{NameKind::Variable, 3}, q{NameKind::Continuation, 3};
        return {{a0, a1},
                pi_input(a0, {z, p},
                         pi_output(a1, {w, q},
                                   pi_par(pi_const(PiConst::FwdCbvCont, {q, p}),
                                          pi_const(PiConst::FwdCbvVar, {w, z}))),
                         /*replicated=*/true)};
      }
      case PiConst::FwdCbnVar: {
        a0 = {NameKind::Variable, 0};
        a1 = {NameKind::Variable, 1};
        Name p{NameKind::Continuation, 2}, q{NameKind::Continuation, 3};
        return {{a0, a1},
                pi_input(a0, {p}, pi_output(a1, {q}, pi_const(PiConst::FwdCbnCont, {q, p})),
                         /*replicated=*/true)};
      }
      case PiConst::FwdCbnCont: {
        a0 = {NameKind::Continuation, 0};
        a1 = {NameKind::Continuation, 1};
        Name v{NameKind::ValueName, 2}, w{NameKind::ValueName, 3};
        return {{a0, a1},
                pi_input(a0, {v}, pi_output(a1, {w}, pi_const(PiConst::FwdCbnVal, {w, v})))};
      }
      case PiConst::FwdCbnVal: {
        a0 = {NameKind::ValueName, 0};
        a1 = {NameKind::ValueName, 1};
        Name x{NameKind::Variable, 2}, p{NameKind::Continuation, 2};
        Name y{NameKind::Variable, 3}, q{NameKind::Continuation, 3};
        return {{a0, a1},
                pi_input(a0, {x, p},
                         pi_output(a1, {y, q},
                                   pi_par(pi_const(PiConst::FwdCbnVar, {y, x}),
                                          pi_const(PiConst::FwdCbnCont, {q, p}))))};
      }
    }
    return {};
  };
  static const PiAbs tbl[] = {def(PiConst::FwdCbvCont), def(PiConst::FwdCbvVar),
                              def(PiConst::FwdCbnVar), def(PiConst::FwdCbnCont),
                              def(PiConst::FwdCbnVal)};
  return tbl[static_cast<int>(c)];
}

// The link a |> b: turns outputs at a into outputs at b. Kinds must agree.
inline Pi make_forwarder(Name a, Name b, CalcMode calc) {
  if (a.kind != b.kind) throw OgspiError("forwarder endpoints have different kinds");
  if (calc == CalcMode::Cbn) {
    switch (a.kind) {
      case NameKind::Variable: return pi_const(PiConst::FwdCbnVar, {a, b});
      case NameKind::Continuation: return pi_const(PiConst::FwdCbnCont, {a, b});
      case NameKind::ValueName: return pi_const(PiConst::FwdCbnVal, {a, b});
    }
  }
  switch (a.kind) {
    case NameKind::Variable: return pi_const(PiConst::FwdCbvVar, {a, b});
    case NameKind::Continuation: return pi_const(PiConst::FwdCbvCont, {a, b});
    default: throw OgspiError("value names do not occur in cbv forwarders");
  }
}

// Sorting stand-in: what a name of a given kind carries.
inline std::vector<NameKind> carried_kinds(NameKind subject, CalcMode calc) {
  if (calc == CalcMode::Cbn) {
    switch (subject) {
      case NameKind::Continuation: return {NameKind::ValueName};
      case NameKind::ValueName: return {NameKind::Variable, NameKind::Continuation};
      case NameKind::Variable: return {NameKind::Continuation};
    }
  }
  switch (subject) {
    case NameKind::Continuation: return {NameKind::Variable};
    case NameKind::Variable: return {NameKind::Variable, NameKind::Continuation};
    default: throw OgspiError("value names are cbn-only");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Traversals

inline void collect_all_names(const Pi& p, FreshBase& base) {
  switch (p->kind) {
    case PiKind::Nil: return;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output:
      base.raise_above(p->subject);
      for (const Name& n : p->binders) base.raise_above(n);
      collect_all_names(p->left, base);
      return;
    case PiKind::Res:
      base.raise_above(p->binders[0]);
      collect_all_names(p->left, base);
      return;
    case PiKind::Par:
      collect_all_names(p->left, base);
      collect_all_names(p->right, base);
      return;
    case PiKind::ConstApp:
      for (const Name& n : p->args) base.raise_above(n);
      return;
  }
}

namespace detail {
inline void free_names_rec(const Pi& p, std::vector<Name>& bound, NameSet& out) {
  auto record = [&](const Name& n) {
    if (std::find(bound.begin(), bound.end(), n) == bound.end()) out.add(n);
  };
  switch (p->kind) {
    case PiKind::Nil: return;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      record(p->subject);
      std::size_t mark = bound.size();
      for (const Name& n : p->binders) bound.push_back(n);
      free_names_rec(p->left, bound, out);
      bound.resize(mark);
      return;
    }
    case PiKind::Res: {
      bound.push_back(p->binders[0]);
      free_names_rec(p->left, bound, out);
      bound.pop_back();
      return;
    }
    case PiKind::Par:
      free_names_rec(p->left, bound, out);
      free_names_rec(p->right, bound, out);
      return;
    case PiKind::ConstApp:
      for (const Name& n : p->args) record(n);
      return;
  }
}
}  // namespace detail

inline NameSet free_names(const Pi& p) {
  NameSet out;
  std::vector<Name> bound;
  detail::free_names_rec(p, bound, out);
  return out;
}

// Name-for-name substitution. Callers guarantee that target names do not
// occur bound (fresh floors make that so); asserted here.
namespace detail {
inline Name subst_name(const Name& n, const std::map<Name, Name>& m) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}
}  // namespace detail

inline Pi pi_subst(const Pi& p, const std::map<Name, Name>& m) {
  if (m.empty()) return p;
  switch (p->kind) {
    case PiKind::Nil: return p;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      auto n = std::make_shared<PiNode>(*p);
      n->subject = detail::subst_name(p->subject, m);
      for (const Name& b : p->binders)
        if (m.count(b)) throw OgspiError("pi substitution would capture " + to_string(b));
      n->left = pi_subst(p->left, m);
      return n;
    }
    case PiKind::Res: {
      if (m.count(p->binders[0]))
        throw OgspiError("pi substitution would capture " + to_string(p->binders[0]));
      auto n = std::make_shared<PiNode>(*p);
      n->left = pi_subst(p->left, m);
      return n;
    }
    case PiKind::Par: {
      auto n = std::make_shared<PiNode>(*p);
      n->left = pi_subst(p->left, m);
      n->right = pi_subst(p->right, m);
      return n;
    }
    case PiKind::ConstApp: {
      auto n = std::make_shared<PiNode>(*p);
      for (Name& a : n->args) a = detail::subst_name(a, m);
      return n;
    }
  }
  return p;
}

// Instantiate a constant's defining equation; the body is closed so only the
// parameters are renamed. Bound names inside the body are refreshed above the
// floor to keep the no-capture discipline global.
inline Pi pi_refresh_bound(const Pi& p, FreshBase& base, std::map<Name, Name>& ren) {
  switch (p->kind) {
    case PiKind::Nil: return p;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      auto n = std::make_shared<PiNode>(*p);
      n->subject = detail::subst_name(p->subject, ren);
      std::map<Name, Name> inner = ren;
      for (Name& b : n->binders) {
        Name fresh = base.make(b.kind);
        inner[b] = fresh;
        b = fresh;
      }
      n->left = pi_refresh_bound(p->left, base, inner);
      return n;
    }
    case PiKind::Res: {
      auto n = std::make_shared<PiNode>(*p);
      std::map<Name, Name> inner = ren;
      Name fresh = base.make(p->binders[0].kind);
      inner[p->binders[0]] = fresh;
      n->binders[0] = fresh;
      n->left = pi_refresh_bound(p->left, base, inner);
      return n;
    }
    case PiKind::Par: {
      auto n = std::make_shared<PiNode>(*p);
      n->left = pi_refresh_bound(p->left, base, ren);
      n->right = pi_refresh_bound(p->right, base, ren);
      return n;
    }
    case PiKind::ConstApp: {
      auto n = std::make_shared<PiNode>(*p);
      for (Name& a : n->args) a = detail::subst_name(a, ren);
      return n;
    }
  }
  return p;
}

inline Pi unfold_const(const Pi& capp, FreshBase& base) {
  const PiAbs& def = const_def(capp->cst);
  if (def.params.size() != capp->args.size())
    throw OgspiError("arity mismatch in constant application");
  std::map<Name, Name> ren;
  for (std::size_t i = 0; i < def.params.size(); ++i) ren[def.params[i]] = capp->args[i];
  return pi_refresh_bound(def.body, base, ren);
}

// ---------------------------------------------------------------------------
// Printing

inline void print_pi(const Pi& p, std::ostream& os, int prec) {
  switch (p->kind) {
    case PiKind::Nil:
      os << "0";
      return;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      if (p->kind == PiKind::RepInput) os << "!";
      os << to_string(p->subject);
      if (p->kind == PiKind::Output) os << "^";
      os << "(";
      for (std::size_t i = 0; i < p->binders.size(); ++i) {
        if (i) os << ",";
        os << to_string(p->binders[i]);
      }
      os << ")";
      if (p->left->kind != PiKind::Nil) {
        os << ".";
        print_pi(p->left, os, 2);
      }
      return;
    }
    case PiKind::Res: {
      bool paren = prec > 1;
      if (paren) os << "(";
      os << "nu " << to_string(p->binders[0]) << ". ";
      print_pi(p->left, os, 1);
      if (paren) os << ")";
      return;
    }
    case PiKind::Par: {
      bool paren = prec > 0;
      if (paren) os << "(";
      print_pi(p->left, os, 1);
      os << " | ";
      print_pi(p->right, os, 1);
      if (paren) os << ")";
      return;
    }
    case PiKind::ConstApp: {
      os << const_name(p->cst) << "<";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) os << ",";
        os << to_string(p->args[i]);
      }
      os << ">";
      return;
    }
  }
}

inline std::string to_string(const Pi& p) {
  std::ostringstream os;
  print_pi(p, os, 0);
  return os.str();
}

inline std::string to_string(const PiAbs& a) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (i) os << ",";
    os << to_string(a.params[i]);
  }
  os << ") ";
  print_pi(a.body, os, 2);
  return os.str();
}

// ---------------------------------------------------------------------------
// Canonical form for state dedup. Applied to memoization keys only, never to
// the transition relation itself.

namespace detail {
inline void par_components(const Pi& p, std::vector<Pi>& out) {
  if (p->kind == PiKind::Par) {
    par_components(p->left, out);
    par_components(p->right, out);
  } else if (p->kind != PiKind::Nil) {
    out.push_back(p);
  }
}
}  // namespace detail

inline Pi normalize(const Pi& p) {
  switch (p->kind) {
    case PiKind::Nil:
    case PiKind::ConstApp:
      return p;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      auto n = std::make_shared<PiNode>(*p);
      n->left = normalize(p->left);
      return n;
    }
    case PiKind::Res: {
      Pi body = normalize(p->left);
      if (!free_names(body).contains(p->binders[0])) return body;
      return pi_res(p->binders[0], body);
    }
    case PiKind::Par: {
      std::vector<Pi> comps;
      detail::par_components(p, comps);
      std::vector<Pi> norm;
      for (const Pi& c : comps) {
        Pi nc = normalize(c);
        if (nc->kind == PiKind::Nil) continue;
        if (nc->kind == PiKind::Par) {
          detail::par_components(nc, norm);
        } else {
          norm.push_back(nc);
        }
      }
      std::sort(norm.begin(), norm.end(),
                [](const Pi& a, const Pi& b) { return to_string(a) < to_string(b); });
      Pi r = pi_nil();
      for (auto it = norm.rbegin(); it != norm.rend(); ++it) r = pi_par(*it, r);
      return r;
    }
  }
  return p;
}

inline std::string canonical_key(const Pi& p) { return to_string(normalize(p)); }

// ---------------------------------------------------------------------------
// The standard LTS

struct PiTransition {
  Action act;
  Pi next;
};

namespace detail {

inline std::vector<Name> fresh_tuple(const std::vector<Name>& like, FreshBase base) {
  std::vector<Name> out;
  out.reserve(like.size());
  for (const Name& n : like) out.push_back(base.make(n.kind));
  return out;
}

inline void pi_steps_rec(const Pi& p, const FreshBase& floor, std::vector<PiTransition>& out) {
  switch (p->kind) {
    case PiKind::Nil:
      return;
    case PiKind::Input: {
      FreshBase base = floor;
      std::vector<Name> fresh = fresh_tuple(p->binders, base);
      std::map<Name, Name> ren;
      for (std::size_t i = 0; i < fresh.size(); ++i)
        if (fresh[i] != p->binders[i]) ren[p->binders[i]] = fresh[i];
      out.push_back({Action::in(p->subject, fresh), pi_subst(p->left, ren)});
      return;
    }
    case PiKind::RepInput: {
      FreshBase base = floor;
      std::vector<Name> fresh = fresh_tuple(p->binders, base);
      std::map<Name, Name> ren;
      for (std::size_t i = 0; i < fresh.size(); ++i)
        if (fresh[i] != p->binders[i]) ren[p->binders[i]] = fresh[i];
      out.push_back({Action::in(p->subject, fresh), pi_par(pi_subst(p->left, ren), p)});
      return;
    }
    case PiKind::Output: {
      FreshBase base = floor;
      std::vector<Name> fresh = fresh_tuple(p->binders, base);
      std::map<Name, Name> ren;
      for (std::size_t i = 0; i < fresh.size(); ++i)
        if (fresh[i] != p->binders[i]) ren[p->binders[i]] = fresh[i];
      out.push_back({Action::out(p->subject, fresh), pi_subst(p->left, ren)});
      return;
    }
    case PiKind::Res: {
      Name v = p->binders[0];
      FreshBase inner = floor;
      inner.raise_above(v);
      std::vector<PiTransition> sub;
      pi_steps_rec(p->left, inner, sub);
      for (auto& t : sub) {
        if (!t.act.is_tau() && t.act.subject == v) continue;  // res blocks v
        out.push_back({t.act, pi_res(v, t.next)});
      }
      return;
    }
    case PiKind::Par: {
      std::vector<PiTransition> ls, rs;
      pi_steps_rec(p->left, floor, ls);
      pi_steps_rec(p->right, floor, rs);
      for (const auto& t : ls) out.push_back({t.act, pi_par(t.next, p->right)});
      for (const auto& t : rs) out.push_back({t.act, pi_par(p->left, t.next)});
      auto combine = [&](const PiTransition& o, const PiTransition& i, bool left_is_out) {
        if (o.act.dir != ActDir::Out || i.act.dir != ActDir::In) return;
        if (o.act.subject != i.act.subject) return;
        if (o.act.objects.size() != i.act.objects.size())
          throw OgspiError("arity mismatch on " + to_string(o.act.subject));
        std::map<Name, Name> ren;
        for (std::size_t k = 0; k < i.act.objects.size(); ++k)
          if (i.act.objects[k] != o.act.objects[k]) ren[i.act.objects[k]] = o.act.objects[k];
        Pi in_next = pi_subst(i.next, ren);
        Pi body = left_is_out ? pi_par(o.next, in_next) : pi_par(in_next, o.next);
        out.push_back({Action::tau(), pi_res(o.act.objects, body)});
      };
      for (const auto& lt : ls)
        for (const auto& rt : rs) {
          combine(lt, rt, true);
          combine(rt, lt, false);
        }
      return;
    }
    case PiKind::ConstApp: {
      FreshBase base = floor;
      Pi body = unfold_const(p, base);
      pi_steps_rec(body, base, out);
      return;
    }
  }
}

}  // namespace detail

// All strong transitions of a process, bound names fresh above `floor`.
inline std::vector<PiTransition> pi_transitions(const Pi& p, const FreshBase& floor) {
  std::vector<PiTransition> out;
  detail::pi_steps_rec(p, floor, out);
  return out;
}

inline std::vector<PiTransition> pi_transitions(const Pi& p) {
  FreshBase floor;
  collect_all_names(p, floor);
  return pi_transitions(p, floor);
}

// A process is input reactive when every immediate transition is an input.
inline bool is_input_reactive(const Pi& p) {
  FreshBase floor;
  collect_all_names(p, floor);
  for (const auto& t : pi_transitions(p, floor))
    if (t.act.dir != ActDir::In) return false;
  return true;
}

// Output-prioritised LTS: inputs are visible only from input-reactive processes.
inline std::vector<PiTransition> pi_op_transitions(const Pi& p, const FreshBase& floor) {
  std::vector<PiTransition> all = pi_transitions(p, floor);
  bool reactive = true;
  for (const auto& t : all)
    if (t.act.dir != ActDir::In) {
      reactive = false;
      break;
    }
  if (reactive) return all;
  std::vector<PiTransition> out;
  for (auto& t : all)
    if (t.act.dir != ActDir::In) out.push_back(std::move(t));
  return out;
}

inline std::vector<PiTransition> pi_op_transitions(const Pi& p) {
  FreshBase floor;
  collect_all_names(p, floor);
  return pi_op_transitions(p, floor);
}

// Agent transitions: an abstraction only performs the abstraction action.
inline std::vector<PiTransition> abs_transitions(const PiAbs& a, const FreshBase& floor) {
  FreshBase base = floor;
  std::vector<Name> fresh = detail::fresh_tuple(a.params, base);
  std::map<Name, Name> ren;
  for (std::size_t i = 0; i < fresh.size(); ++i)
    if (fresh[i] != a.params[i]) ren[a.params[i]] = fresh[i];
  return {{Action::abs(fresh), pi_subst(a.body, ren)}};
}

// ---------------------------------------------------------------------------
// Free name polarities and the cannot-interact predicate

struct NamePolarities {
  NameSet in_subjects;
  NameSet out_subjects;
};

namespace detail {
inline void polarities_rec(const Pi& p, std::vector<Name>& bound, NamePolarities& out) {
  auto record = [&](const Name& n, bool input) {
    if (std::find(bound.begin(), bound.end(), n) != bound.end()) return;
    (input ? out.in_subjects : out.out_subjects).add(n);
  };
  switch (p->kind) {
    case PiKind::Nil: return;
    case PiKind::Input:
    case PiKind::RepInput:
    case PiKind::Output: {
      record(p->subject, p->kind != PiKind::Output);
      std::size_t mark = bound.size();
      for (const Name& n : p->binders) bound.push_back(n);
      polarities_rec(p->left, bound, out);
      bound.resize(mark);
      return;
    }
    case PiKind::Res: {
      bound.push_back(p->binders[0]);
      polarities_rec(p->left, bound, out);
      bound.pop_back();
      return;
    }
    case PiKind::Par:
      polarities_rec(p->left, bound, out);
      polarities_rec(p->right, bound, out);
      return;
    case PiKind::ConstApp:
      // all forwarder constants input at arg 0 and output at arg 1
      record(p->args[0], true);
      record(p->args[1], false);
      return;
  }
}
}  // namespace detail

inline NamePolarities name_polarities(const Pi& p) {
  NamePolarities out;
  std::vector<Name> bound;
  detail::polarities_rec(p, bound, out);
  return out;
}

// No name free in both processes with opposite polarities.
inline bool cannot_interact(const Pi& p, const Pi& q) {
  NamePolarities a = name_polarities(p);
  NamePolarities b = name_polarities(q);
  for (const Name& n : a.in_subjects.items())
    if (b.out_subjects.contains(n)) return false;
  for (const Name& n : a.out_subjects.items())
    if (b.in_subjects.contains(n)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Textual pi syntax: a(x,y).P, a^(x,y).P, !a(x).P, nu x. P, P | Q, 0.
// Head letters pick kinds: p,q,r continuations; v,w value names; rest variables.

class PiParser {
 public:
  explicit PiParser(std::string_view text) : lex_(text) { table_.explicit_names = true; }

  Pi parse() {
    Pi p = par();
    if (!lex_.eof()) lex_.fail("trailing input");
    return p;
  }

 private:
  Pi par() {
    Pi l = prefix();
    while (lex_.eat('|')) {
      Pi r = prefix();
      auto n = std::make_shared<PiNode>();
      n->kind = PiKind::Par;
      n->left = l;
      n->right = r;
      l = n;
    }
    return l;
  }

  Pi prefix() {
    if (lex_.eat('0')) return pi_nil();
    if (lex_.eat('(')) {
      Pi p = par();
      lex_.expect(')', "to close parenthesis");
      return p;
    }
    if (lex_.eat('!')) {
      Pi body = prefix();
      if (body->kind != PiKind::Input) lex_.fail("'!' must guard an input prefix");
      auto n = std::make_shared<PiNode>(*body);
      n->kind = PiKind::RepInput;
      return n;
    }
    auto id = lex_.ident();
    if (!id) lex_.fail("expected a process");
    if (*id == "nu") {
      auto v = lex_.ident();
      if (!v) lex_.fail("expected a name after nu");
      Name n = name_of(*v);
      lex_.expect('.', "after nu binder");
      return pi_res(n, prefix());
    }
    Name subj = name_of(*id);
    bool output = lex_.eat('^');
    lex_.expect('(', "to open the payload tuple");
    std::vector<Name> payload;
    if (lex_.peek() != ')') {
      while (true) {
        auto pid = lex_.ident();
        if (!pid) lex_.fail("expected a payload name");
        payload.push_back(name_of(*pid));
        if (!lex_.eat(',')) break;
      }
    }
    lex_.expect(')', "to close the payload tuple");
    for (std::size_t i = 0; i < payload.size(); ++i)
      for (std::size_t j = i + 1; j < payload.size(); ++j)
        if (payload[i] == payload[j]) lex_.fail("payload tuples must be pairwise distinct");
    Pi body = pi_nil();
    if (lex_.eat('.')) body = prefix();
    return output ? pi_output(subj, payload, body) : pi_input(subj, payload, body);
  }

  Name name_of(const std::string& id) { return table_.lookup(id); }

  detail::Lexer lex_;
  detail::NameTable table_;
};

inline Pi parse_pi(std::string_view text) { return PiParser(text).parse(); }

}  // namespace ogspi
