#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ogspi/term.hpp"

namespace ogspi {

struct ParseError : OgspiError {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : OgspiError(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_),
        col(col_) {}
};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  // Lookahead without consuming; offset in raw characters after current token start.
  char peek_raw(std::size_t off) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }

  void bump() {
    if (pos_ < text_.size()) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  bool eat(char c) {
    if (peek() == c) {
      bump();
      return true;
    }
    return false;
  }

  bool eat_str(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) == s) {
      for (std::size_t i = 0; i < s.size(); ++i) bump();
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    if (!eat(c)) fail("expected '" + std::string(1, c) + "' " + what);
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    char c = text_[pos_];
    if (!std::islower(static_cast<unsigned char>(c))) return std::nullopt;
    std::string out;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
        out.push_back(d);
        bump();
      } else {
        break;
      }
    }
    return out;
  }

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Identifier policy. Plain mode numbers identifiers by first occurrence,
// binders freshly at each binding site. Explicit mode maps canonical
// spellings (x3, p0, v1) to the exact name; other spellings get kinds from
// their head letter (p,q,r continuations; v,w value names) and stable ids.
struct NameTable {
  bool explicit_names = false;
  std::map<std::string, Name> map;
  FreshBase counters;

  static std::optional<Name> canonical(const std::string& id) {
    if (id.size() < 2) return std::nullopt;
    NameKind k;
    switch (id[0]) {
      case 'x': k = NameKind::Variable; break;
      case 'p': k = NameKind::Continuation; break;
      case 'v': k = NameKind::ValueName; break;
      default: return std::nullopt;
    }
    for (std::size_t i = 1; i < id.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(id[i]))) return std::nullopt;
    return Name{k, std::stoi(id.substr(1))};
  }

  NameKind kind_of(const std::string& id) const {
    if (!explicit_names) return NameKind::Variable;
    switch (id[0]) {
      case 'p':
      case 'q':
      case 'r': return NameKind::Continuation;
      case 'v':
      case 'w': return NameKind::ValueName;
      default: return NameKind::Variable;
    }
  }

  Name fresh(NameKind k) { return counters.make(k); }

  Name lookup(const std::string& id) {
    if (explicit_names) {
      if (auto c = canonical(id)) {
        counters.raise_above(*c);
        return *c;
      }
    }
    auto it = map.find(id);
    if (it != map.end()) return it->second;
    Name n = fresh(kind_of(id));
    map.emplace(id, n);
    return n;
  }
};

}  // namespace detail

// Recursive-descent parser for the term grammar. Binders shadow by spelling;
// each binding site gets a fresh number.
class TermParser {
 public:
  TermParser(std::string_view text, CalcMode mode, bool explicit_names = false)
      : lex_(text), mode_(mode) {
    names_.explicit_names = explicit_names;
  }

  // Locations already in scope (e.g. from an ambient store provided on the CLI).
  void preintroduce_loc(const std::string& spelling, Loc l) {
    locs_[spelling] = l;
    scoped_locs_.push_back(l);
    if (l.id >= next_loc_) next_loc_ = l.id + 1;
  }

  Term parse() {
    Term t = term();
    if (!lex_.eof()) lex_.fail("trailing input");
    return t;
  }

  detail::Lexer& lexer() { return lex_; }

  Term term() {
    Term t = atom_or_prefix();
    while (true) {
      char c = lex_.peek();
      if (c == '(' || c == '\\' || c == '!' ||
          std::islower(static_cast<unsigned char>(c))) {
        // stop before rho-mode keywords that start a new clause
        if (starts_assign()) break;
        Term arg = atom_or_prefix();
        t = mk_app(t, arg);
      } else {
        break;
      }
    }
    return t;
  }

 private:
  bool starts_assign() {
    // "l := ..." must not be swallowed as an application argument.
    lex_.skip_ws();
    if (lex_.peek() != 'l' || mode_ != CalcMode::Rho) return false;
    std::size_t i = 1;
    while (std::isalnum(static_cast<unsigned char>(lex_.peek_raw(i))) || lex_.peek_raw(i) == '_')
      ++i;
    while (std::isspace(static_cast<unsigned char>(lex_.peek_raw(i)))) ++i;
    return lex_.peek_raw(i) == ':' && lex_.peek_raw(i + 1) == '=';
  }

  Term atom_or_prefix() {
    char c = lex_.peek();
    if (c == '\\' || lex_.eat_str("\xce\xbb")) {  // '\' or 'λ'
      lex_.eat('\\');
      return lambda();
    }
    if (c == '!') {
      if (mode_ != CalcMode::Rho) lex_.fail("'!' is only available in rho mode");
      lex_.bump();
      return mk_deref(location());
    }
    if (c == '(') {
      lex_.bump();
      Term t = term();
      lex_.expect(')', "to close parenthesis");
      return t;
    }
    auto id = lex_.ident();
    if (!id) lex_.fail("expected a term");
    if (*id == "rho") {
      if (mode_ != CalcMode::Rho) lex_.fail("'rho' is only available in rho mode");
      return rho_new();
    }
    if (mode_ == CalcMode::Rho && (*id)[0] == 'l') {
      // location identifier: either "l := V; M" or an error in term position
      lex_.skip_ws();
      if (lex_.eat_str(":=")) return assign(*id);
      lex_.fail("location '" + *id + "' used as a term (locations are not values)");
    }
    return var_use(*id);
  }

  Term lambda() {
    auto id = lex_.ident();
    if (!id) lex_.fail("expected a binder after lambda");
    lex_.expect('.', "after binder");
    Name binder = names_.fresh(NameKind::Variable);
    scope_.push_back({*id, binder});
    Term body = term();
    scope_.pop_back();
    return mk_lam(binder, body);
  }

  Term var_use(const std::string& id) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == id) return mk_var(it->second);
    Name n = names_.lookup(id);
    if (n.kind == NameKind::ValueName && mode_ != CalcMode::Cbn)
      lex_.fail("value name '" + id + "' outside cbn mode");
    if (n.kind == NameKind::ValueName) return mk_valname(n);
    if (n.kind != NameKind::Variable) lex_.fail("name '" + id + "' cannot appear in a term");
    return mk_var(n);
  }

  Loc location() {
    auto id = lex_.ident();
    if (!id || (*id)[0] != 'l') lex_.fail("expected a location identifier (prefixed 'l')");
    auto it = locs_.find(*id);
    if (it != locs_.end()) return it->second;
    // Dereferencing or assigning a location that was never introduced.
    lex_.fail("unbound location '" + *id + "'");
  }

  Loc introduce_loc(const std::string& id) {
    auto it = locs_.find(id);
    if (it != locs_.end()) return it->second;  // rho rebinding shadows by spelling
    Loc l{next_loc_++};
    locs_[id] = l;
    return l;
  }

  Term assign(const std::string& id) {
    auto it = locs_.find(id);
    if (it == locs_.end()) lex_.fail("unbound location '" + id + "'");
    Term v = atom_or_prefix();
    if (!is_value(v, CalcMode::Rho)) lex_.fail("assigned term must be a value");
    lex_.expect(';', "after assignment");
    Term cont = term();
    return mk_assign(it->second, v, cont);
  }

  Term rho_new() {
    lex_.expect('{', "after rho");
    Store s;
    std::vector<std::pair<std::string, Loc>> introduced;
    // two passes on the binding list so entries may refer to each other
    std::vector<std::pair<Loc, std::string>> pending;
    if (lex_.peek() != '}') {
      while (true) {
        auto id = lex_.ident();
        if (!id || (*id)[0] != 'l') lex_.fail("expected a location identifier");
        Loc l = introduce_loc(*id);
        introduced.emplace_back(*id, l);
        lex_.expect('=', "after location");
        Term v = term();
        if (!is_value(v, CalcMode::Rho)) lex_.fail("store entries must be values");
        s.put(l, v);
        if (!lex_.eat(',')) break;
      }
    }
    lex_.expect('}', "to close store");
    lex_.expect('.', "after store");
    Term body = term();
    return mk_rho(std::move(s), body);
  }

  detail::Lexer lex_;
  CalcMode mode_;
  detail::NameTable names_;
  std::vector<std::pair<std::string, Name>> scope_;
  std::map<std::string, Loc> locs_;
  std::vector<Loc> scoped_locs_;
  int next_loc_ = 0;
};

inline Term parse_term(std::string_view text, CalcMode mode) {
  TermParser p(text, mode);
  return p.parse();
}

// Variant used by configuration/process literals: x3/p0/v1 denote those exact names.
inline Term parse_term_explicit(std::string_view text, CalcMode mode) {
  TermParser p(text, mode, /*explicit_names=*/true);
  return p.parse();
}

}  // namespace ogspi
