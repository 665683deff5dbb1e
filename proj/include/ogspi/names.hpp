#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ogspi {

// Names are kinded integers. Rendering is fixed: x<id>, p<id>, v<id>.
enum class NameKind : uint8_t { Variable = 0, Continuation = 1, ValueName = 2 };

constexpr int kNameKinds = 3;

struct Name {
  NameKind kind{NameKind::Variable};
  int id{0};

  friend auto operator<=>(const Name&, const Name&) = default;
};

inline char kind_letter(NameKind k) {
  switch (k) {
    case NameKind::Variable: return 'x';
    case NameKind::Continuation: return 'p';
    case NameKind::ValueName: return 'v';
  }
  return '?';
}

inline std::string to_string(const Name& n) {
  return kind_letter(n.kind) + std::to_string(n.id);
}

// Store locations for the rho-calculus. Not names: they are never exchanged.
struct Loc {
  int id{0};
  friend auto operator<=>(const Loc&, const Loc&) = default;
};

inline std::string to_string(const Loc& l) { return "l" + std::to_string(l.id); }

// A name support: the set of names exchanged so far. Doubles as the supply,
// since fresh names are drawn above everything recorded here.
class NameSet {
 public:
  NameSet() = default;
  explicit NameSet(std::initializer_list<Name> ns) : names_(ns) {}

  bool contains(const Name& n) const { return names_.count(n) > 0; }
  void add(const Name& n) { names_.insert(n); }
  void add_all(const NameSet& other) {
    names_.insert(other.names_.begin(), other.names_.end());
  }
  std::size_t size() const { return names_.size(); }
  const std::set<Name>& items() const { return names_; }

  friend bool operator==(const NameSet&, const NameSet&) = default;

 private:
  std::set<Name> names_;
};

// Deterministic fresh-name source: per-kind counters that sit above every
// name of the states involved. Allocation order within one action is fixed
// (callers request payload variables before continuations).
struct FreshBase {
  int next[kNameKinds] = {0, 0, 0};

  Name make(NameKind k) { return Name{k, next[static_cast<int>(k)]++}; }

  void raise_above(const Name& n) {
    int& slot = next[static_cast<int>(n.kind)];
    if (n.id >= slot) slot = n.id + 1;
  }
  void raise_above(const NameSet& s) {
    for (const Name& n : s.items()) raise_above(n);
  }
  void merge(const FreshBase& other) {
    for (int i = 0; i < kNameKinds; ++i)
      if (other.next[i] > next[i]) next[i] = other.next[i];
  }
};

struct OgspiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ogspi
