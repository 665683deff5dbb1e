#pragma once

#include <random>

#include "ogspi/term.hpp"

namespace ogspi {

// The free variable shared by all 1-open corpus terms.
inline Name corpus_free_var() { return Name{NameKind::Variable, 0}; }

namespace fixtures {

inline Term identity() {
  Name x{NameKind::Variable, 1};
  return mk_lam(x, mk_var(x));
}

inline Term omega() {
  Name x{NameKind::Variable, 1};
  Term d = mk_lam(x, mk_app(mk_var(x), mk_var(x)));
  Name y{NameKind::Variable, 2};
  Term d2 = mk_lam(y, mk_app(mk_var(y), mk_var(y)));
  return mk_app(d, d2);
}

// (\z. Omega)(x (\y. body))
inline Term remark_term(Term inner_body, Name y) {
  Name z{NameKind::Variable, 3};
  Term fun = mk_lam(z, omega());
  Term arg = mk_app(mk_var(corpus_free_var()), mk_lam(y, std::move(inner_body)));
  return mk_app(fun, arg);
}

inline Term remark_omega() {
  Name y{NameKind::Variable, 4};
  return remark_term(omega(), y);
}
inline Term remark_id() {
  Name y{NameKind::Variable, 4};
  return remark_term(mk_var(y), y);
}

inline Term church_true() {
  Name t{NameKind::Variable, 1}, f{NameKind::Variable, 2};
  return mk_lam(t, mk_lam(f, mk_var(t)));
}
inline Term church_false() {
  Name t{NameKind::Variable, 1}, f{NameKind::Variable, 2};
  return mk_lam(t, mk_lam(f, mk_var(f)));
}

// x (\y. y) and x (\y. Omega): distinguished by complete well-bracketed
// traces, hence by a store context.
inline Term call_with_id() {
  Name y{NameKind::Variable, 4};
  return mk_app(mk_var(corpus_free_var()), mk_lam(y, mk_var(y)));
}
inline Term call_with_omega() {
  Name y{NameKind::Variable, 4};
  return mk_app(mk_var(corpus_free_var()), mk_lam(y, omega()));
}

inline std::vector<Term> all() {
  return {identity(),     omega(),        remark_omega(), remark_id(),
          church_true(),  church_false(), call_with_id(), call_with_omega()};
}

}  // namespace fixtures

enum class CorpusMode : uint8_t { Mixed, Closed, Open };

namespace detail {

class TermGen {
 public:
  TermGen(uint64_t seed, bool open1) : rng_(seed), open_(open1) {}

  Term gen(int max_size) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      scope_.clear();
      if (open_) scope_.push_back(corpus_free_var());
      next_var_ = 1;
      int size = 2 + static_cast<int>(rng_() % static_cast<uint64_t>(std::max(1, max_size - 1)));
      Term t = term(std::min(size, max_size));
      if (term_size(t) <= max_size) return t;
    }
    Name x{NameKind::Variable, next_var_++};
    return mk_lam(x, mk_var(x));
  }

 private:
  uint64_t pick(uint64_t n) { return rng_() % n; }

  Term term(int budget) {
    if (budget <= 1) {
      if (!scope_.empty()) return mk_var(scope_[pick(scope_.size())]);
      budget = 2;  // no variable reachable: force an abstraction
    }
    // weight lambdas a little over applications to keep terms interesting
    bool can_app = budget >= 3 || (budget >= 2 && !scope_.empty());
    uint64_t roll = pick(10);
    if (!can_app || roll < 5) {
      Name x{NameKind::Variable, next_var_++};
      scope_.push_back(x);
      Term body = term(budget - 1);
      scope_.pop_back();
      return mk_lam(x, body);
    }
    int left = 1 + static_cast<int>(pick(static_cast<uint64_t>(std::max(1, budget - 2))));
    Term f = term(left);
    Term a = term(budget - 1 - term_size(f));
    return mk_app(f, a);
  }

  std::mt19937_64 rng_;
  bool open_;
  std::vector<Name> scope_;
  int next_var_;
};

}  // namespace detail

// Deterministic corpus: the fixed fixture list first, then pseudo-random
// closed and 1-open terms, each generated within the size bound.
inline std::vector<Term> gen_corpus(uint64_t seed, int count, int max_size,
                                    CorpusMode mode = CorpusMode::Mixed) {
  std::vector<Term> out;
  for (Term& t : fixtures::all()) {
    if (static_cast<int>(out.size()) >= count) break;
    out.push_back(std::move(t));
  }
  uint64_t idx = 0;
  while (static_cast<int>(out.size()) < count) {
    bool open1 = mode == CorpusMode::Open || (mode == CorpusMode::Mixed && idx % 2 == 1);
    detail::TermGen gen(seed * 1000003ull + idx, open1);
    out.push_back(gen.gen(max_size));
    ++idx;
  }
  return out;
}

}  // namespace ogspi
