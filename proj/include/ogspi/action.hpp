#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ogspi/names.hpp"

namespace ogspi {

// The action grammar shared by OGS and piI: inputs a(b~), bound outputs
// a^(b~), the abstraction action (a~), and tau. OGS action kinds (PA, OQ,
// IOQ, ...) are classifications over this grammar.
enum class ActDir : uint8_t { Out, In, Abs, Tau };

struct Action {
  ActDir dir{ActDir::Tau};
  Name subject{};             // Out/In only
  std::vector<Name> objects;  // bound names: payload (Out/In) or parameters (Abs)

  friend auto operator<=>(const Action&, const Action&) = default;

  static Action tau() { return {}; }
  static Action out(Name s, std::vector<Name> objs) {
    return {ActDir::Out, s, std::move(objs)};
  }
  static Action in(Name s, std::vector<Name> objs) {
    return {ActDir::In, s, std::move(objs)};
  }
  static Action abs(std::vector<Name> params) {
    return {ActDir::Abs, Name{}, std::move(params)};
  }

  bool is_tau() const { return dir == ActDir::Tau; }
  bool is_visible() const { return dir != ActDir::Tau; }
  bool is_output() const { return dir == ActDir::Out; }
  bool is_input() const { return dir == ActDir::In || dir == ActDir::Abs; }
  bool is_answer() const {
    return (dir == ActDir::Out || dir == ActDir::In) && subject.kind == NameKind::Continuation;
  }
  bool is_question() const {
    return (dir == ActDir::Out || dir == ActDir::In) && subject.kind != NameKind::Continuation;
  }
};

// Player actions are the outputs; Opponent actions are inputs and the
// abstraction action.
enum class Polarity : uint8_t { P, O };

inline Polarity polarity(const Action& a) {
  return a.dir == ActDir::Out ? Polarity::P : Polarity::O;
}

// OGS-style label for display: PA/OA/PQ/OQ/IOQ plus the CBN question kinds.
inline std::string ogs_kind(const Action& a) {
  switch (a.dir) {
    case ActDir::Tau: return "Tau";
    case ActDir::Abs: return "IOQ";
    case ActDir::Out:
      switch (a.subject.kind) {
        case NameKind::Continuation: return "PA";
        case NameKind::Variable: return a.objects.size() == 1 ? "PTQ" : "PQ";
        case NameKind::ValueName: return "PVQ";
      }
      break;
    case ActDir::In:
      switch (a.subject.kind) {
        case NameKind::Continuation: return "OA";
        case NameKind::Variable: return a.objects.size() == 1 ? "OTQ" : "OQ";
        case NameKind::ValueName: return "OVQ";
      }
      break;
  }
  return "?";
}

inline std::string to_string(const Action& a) {
  if (a.dir == ActDir::Tau) return "tau";
  std::ostringstream os;
  if (a.dir == ActDir::Abs) {
    os << "(";
  } else {
    os << to_string(a.subject);
    if (a.dir == ActDir::Out) os << "^";
    os << "(";
  }
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    if (i) os << ",";
    os << to_string(a.objects[i]);
  }
  os << ")";
  return os.str();
}

using Trace = std::vector<Action>;

inline std::string to_string(const Trace& t) {
  if (t.empty()) return "eps";
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += " . ";
    s += to_string(t[i]);
  }
  return s;
}

inline NameSet bound_names(const Trace& t) {
  NameSet out;
  for (const Action& a : t)
    for (const Name& n : a.objects) out.add(n);
  return out;
}

// Freshness convention check: each bound name of an action is new for the
// whole preceding prefix and distinct from the other bound names.
inline bool trace_respects_freshness(const Trace& t) {
  NameSet seen;
  for (const Action& a : t) {
    if (a.dir == ActDir::In || a.dir == ActDir::Out) seen.add(a.subject);
    for (const Name& n : a.objects) {
      if (seen.contains(n)) return false;
      seen.add(n);
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Canonical traces: every bound name is replaced by a placeholder indexed by
// the order of its first (binding) occurrence, kind-preserving. Free names
// stay as they are; the bound flag keeps the two spaces apart.

struct CanonName {
  NameKind kind{NameKind::Variable};
  bool bound{false};
  int idx{0};

  friend auto operator<=>(const CanonName&, const CanonName&) = default;
};

inline std::string to_string(const CanonName& n) {
  std::string s = kind_letter(n.kind) + std::to_string(n.idx);
  return n.bound ? s : "." + s;
}

struct CanonAction {
  ActDir dir{ActDir::Tau};
  CanonName subject{};
  std::vector<CanonName> objects;

  friend auto operator<=>(const CanonAction&, const CanonAction&) = default;
};

using CanonTrace = std::vector<CanonAction>;

inline CanonTrace canonical_trace(const Trace& t) {
  CanonTrace out;
  std::map<Name, CanonName> binder;
  int next = 0;
  auto resolve = [&](const Name& n) -> CanonName {
    auto it = binder.find(n);
    if (it != binder.end()) return it->second;
    return CanonName{n.kind, false, n.id};
  };
  for (const Action& a : t) {
    if (a.is_tau()) continue;
    CanonAction ca;
    ca.dir = a.dir;
    if (a.dir != ActDir::Abs) ca.subject = resolve(a.subject);
    for (const Name& n : a.objects) {
      CanonName cn{n.kind, true, next++};
      binder[n] = cn;
      ca.objects.push_back(cn);
    }
    out.push_back(std::move(ca));
  }
  return out;
}

inline std::string to_string(const CanonAction& a) {
  if (a.dir == ActDir::Tau) return "tau";
  std::ostringstream os;
  if (a.dir == ActDir::Abs) {
    os << "(";
  } else {
    os << to_string(a.subject);
    if (a.dir == ActDir::Out) os << "^";
    os << "(";
  }
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    if (i) os << ",";
    os << to_string(a.objects[i]);
  }
  os << ")";
  return os.str();
}

inline std::string to_string(const CanonTrace& t) {
  if (t.empty()) return "eps";
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += " . ";
    s += to_string(t[i]);
  }
  return s;
}

using CanonTraceSet = std::set<CanonTrace>;

// ---------------------------------------------------------------------------
// Justification pointers: an action is justified by the action that binds its
// free (subject) name. Index of the justifier, or nullopt for initial actions.
inline std::vector<std::optional<std::size_t>> justifiers(const Trace& t) {
  std::vector<std::optional<std::size_t>> out(t.size());
  std::map<Name, std::size_t> bound_at;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Action& a = t[i];
    if (a.dir == ActDir::In || a.dir == ActDir::Out) {
      auto it = bound_at.find(a.subject);
      if (it != bound_at.end()) out[i] = it->second;
    }
    for (const Name& n : a.objects) bound_at[n] = i;
  }
  return out;
}

}  // namespace ogspi
