#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "ogspi/names.hpp"

namespace ogspi {

// One tree covers the three calculi. CBV terms use Var/Lam/App only; the CBN
// extended terms add ValName; rho terms add RhoNew/Assign/Deref and never
// contain ValName.
enum class TermKind : uint8_t { Var, Lam, App, ValName, RhoNew, Assign, Deref };

enum class CalcMode : uint8_t { Cbv, Cbn, Rho };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// Finite map loc -> value, kept sorted by location id.
struct StoreEntry {
  Loc loc;
  Term value;
};

struct Store {
  std::vector<StoreEntry> entries;

  const Term* lookup(Loc l) const {
    for (const auto& e : entries)
      if (e.loc == l) return &e.value;
    return nullptr;
  }
  void put(Loc l, Term v) {
    for (auto& e : entries)
      if (e.loc == l) {
        e.value = std::move(v);
        return;
      }
    entries.push_back({l, std::move(v)});
    std::sort(entries.begin(), entries.end(),
              [](const StoreEntry& a, const StoreEntry& b) { return a.loc < b.loc; });
  }
  bool contains(Loc l) const { return lookup(l) != nullptr; }
};

struct TermNode {
  TermKind kind;
  Name name{};   // Var: the variable; Lam: the binder; ValName: the value name
  Term a, b;     // Lam: body=a; App: fun=a, arg=b; Assign: value=a, cont=b; RhoNew: body=a
  Loc loc{};     // Assign, Deref
  Store store;   // RhoNew
};

inline Term mk_var(Name x) {
  assert(x.kind == NameKind::Variable);
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->name = x;
  return n;
}

inline Term mk_valname(Name v) {
  assert(v.kind == NameKind::ValueName);
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::ValName;
  n->name = v;
  return n;
}

inline Term mk_lam(Name x, Term body) {
  assert(x.kind == NameKind::Variable);
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Lam;
  n->name = x;
  n->a = std::move(body);
  return n;
}

inline Term mk_app(Term f, Term arg) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->a = std::move(f);
  n->b = std::move(arg);
  return n;
}

inline Term mk_rho(Store s, Term body) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::RhoNew;
  n->store = std::move(s);
  n->a = std::move(body);
  return n;
}

inline Term mk_assign(Loc l, Term v, Term cont) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Assign;
  n->loc = l;
  n->a = std::move(v);
  n->b = std::move(cont);
  return n;
}

inline Term mk_deref(Loc l) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Deref;
  n->loc = l;
  return n;
}

// Values: variables and abstractions; in CBN also value names.
inline bool is_value(const Term& t, CalcMode mode) {
  switch (t->kind) {
    case TermKind::Lam: return true;
    case TermKind::Var: return mode != CalcMode::Cbn;
    case TermKind::ValName: return mode == CalcMode::Cbn;
    default: return false;
  }
}

inline void collect_free_names(const Term& t, std::vector<Name>& bound, NameSet& out) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      if (std::find(bound.begin(), bound.end(), t->name) == bound.end()) out.add(t->name);
      return;
    case TermKind::Lam:
      bound.push_back(t->name);
      collect_free_names(t->a, bound, out);
      bound.pop_back();
      return;
    case TermKind::App:
      collect_free_names(t->a, bound, out);
      collect_free_names(t->b, bound, out);
      return;
    case TermKind::RhoNew:
      for (const auto& e : t->store.entries) collect_free_names(e.value, bound, out);
      collect_free_names(t->a, bound, out);
      return;
    case TermKind::Assign:
      collect_free_names(t->a, bound, out);
      collect_free_names(t->b, bound, out);
      return;
    case TermKind::Deref:
      return;
  }
}

inline NameSet free_names(const Term& t) {
  NameSet out;
  std::vector<Name> bound;
  collect_free_names(t, bound, out);
  return out;
}

// Every name occurring in the term, binders included. Used to seed fresh-name
// floors so that action names never collide with anything in a configuration.
inline void collect_all_names(const Term& t, FreshBase& base) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      base.raise_above(t->name);
      return;
    case TermKind::Lam:
      base.raise_above(t->name);
      collect_all_names(t->a, base);
      return;
    case TermKind::App:
      collect_all_names(t->a, base);
      collect_all_names(t->b, base);
      return;
    case TermKind::RhoNew:
      for (const auto& e : t->store.entries) collect_all_names(e.value, base);
      collect_all_names(t->a, base);
      return;
    case TermKind::Assign:
      collect_all_names(t->a, base);
      collect_all_names(t->b, base);
      return;
    case TermKind::Deref:
      return;
  }
}

inline void collect_locations(const Term& t, std::set<Loc>& out) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      return;
    case TermKind::Lam:
      collect_locations(t->a, out);
      return;
    case TermKind::App:
      collect_locations(t->a, out);
      collect_locations(t->b, out);
      return;
    case TermKind::RhoNew:
      for (const auto& e : t->store.entries) {
        out.insert(e.loc);
        collect_locations(e.value, out);
      }
      collect_locations(t->a, out);
      return;
    case TermKind::Assign:
      out.insert(t->loc);
      collect_locations(t->a, out);
      collect_locations(t->b, out);
      return;
    case TermKind::Deref:
      out.insert(t->loc);
      return;
  }
}

inline std::set<Loc> locations(const Term& t) {
  std::set<Loc> out;
  collect_locations(t, out);
  return out;
}

inline std::set<Loc> locations(const Store& s) {
  std::set<Loc> out;
  for (const auto& e : s.entries) {
    out.insert(e.loc);
    collect_locations(e.value, out);
  }
  return out;
}

inline int term_size(const Term& t) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
    case TermKind::Deref:
      return 1;
    case TermKind::Lam:
    case TermKind::RhoNew:
      return 1 + term_size(t->a);
    case TermKind::App:
    case TermKind::Assign:
      return 1 + term_size(t->a) + term_size(t->b);
  }
  return 1;
}

inline void print_term(const Term& t, std::ostream& os, int prec);

inline std::string to_string(const Store& s) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& e : s.entries) {
    if (!first) os << ", ";
    first = false;
    os << to_string(e.loc) << " = ";
    print_term(e.value, os, 0);
  }
  os << "}";
  return os.str();
}

// prec 0: top, 1: application operand position (left), 2: atom position.
inline void print_term(const Term& t, std::ostream& os, int prec) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      os << to_string(t->name);
      return;
    case TermKind::Lam: {
      bool paren = prec > 0;
      if (paren) os << "(";
      os << "\\" << to_string(t->name) << ". ";
      print_term(t->a, os, 0);
      if (paren) os << ")";
      return;
    }
    case TermKind::App: {
      bool paren = prec > 1;
      if (paren) os << "(";
      print_term(t->a, os, 1);
      os << " ";
      print_term(t->b, os, 2);
      if (paren) os << ")";
      return;
    }
    case TermKind::RhoNew: {
      bool paren = prec > 0;
      if (paren) os << "(";
      os << "rho " << to_string(t->store) << ". ";
      print_term(t->a, os, 0);
      if (paren) os << ")";
      return;
    }
    case TermKind::Assign: {
      bool paren = prec > 0;
      if (paren) os << "(";
      os << to_string(t->loc) << " := ";
      print_term(t->a, os, 1);
      os << "; ";
      print_term(t->b, os, 0);
      if (paren) os << ")";
      return;
    }
    case TermKind::Deref:
      os << "!" << to_string(t->loc);
      return;
  }
}

inline std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(t, os, 0);
  return os.str();
}

// Blunt name renaming: replaces every occurrence. Callers only rename names
// that are fresh for the term's binders (the fresh-floor discipline), so no
// capture can occur.
inline Term term_rename(const Term& t, const std::map<Name, Name>& m) {
  if (m.empty()) return t;
  auto ren = [&](const Name& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  switch (t->kind) {
    case TermKind::Var:
      return t->name == ren(t->name) ? t : mk_var(ren(t->name));
    case TermKind::ValName:
      return t->name == ren(t->name) ? t : mk_valname(ren(t->name));
    case TermKind::Lam:
      return mk_lam(ren(t->name), term_rename(t->a, m));
    case TermKind::App:
      return mk_app(term_rename(t->a, m), term_rename(t->b, m));
    case TermKind::RhoNew: {
      Store s;
      for (const auto& e : t->store.entries) s.put(e.loc, term_rename(e.value, m));
      return mk_rho(std::move(s), term_rename(t->a, m));
    }
    case TermKind::Assign:
      return mk_assign(t->loc, term_rename(t->a, m), term_rename(t->b, m));
    case TermKind::Deref:
      return t;
  }
  return t;
}

// Structural equality on exact names. Environments compare entries with this;
// alpha-insensitive comparisons go through printing after fresh renumbering.
inline bool term_eq(const Term& s, const Term& t) {
  if (s == t) return true;
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case TermKind::Var:
    case TermKind::ValName:
      return s->name == t->name;
    case TermKind::Lam:
      return s->name == t->name && term_eq(s->a, t->a);
    case TermKind::App:
      return term_eq(s->a, t->a) && term_eq(s->b, t->b);
    case TermKind::Deref:
      return s->loc == t->loc;
    case TermKind::Assign:
      return s->loc == t->loc && term_eq(s->a, t->a) && term_eq(s->b, t->b);
    case TermKind::RhoNew: {
      if (s->store.entries.size() != t->store.entries.size()) return false;
      for (std::size_t i = 0; i < s->store.entries.size(); ++i) {
        if (s->store.entries[i].loc != t->store.entries[i].loc) return false;
        if (!term_eq(s->store.entries[i].value, t->store.entries[i].value)) return false;
      }
      return term_eq(s->a, t->a);
    }
  }
  return false;
}

}  // namespace ogspi
