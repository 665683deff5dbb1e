#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ogspi/stepper.hpp"

namespace ogspi {

// ---------------------------------------------------------------------------
// Bounded equivalence verdicts

struct Verdict {
  enum class Kind : uint8_t { Equivalent, Distinguished, Inconclusive } kind;
  int depth{0};
  CanonTrace witness;        // Distinguished: a shortest distinguishing trace /
                             // the failing challenge sequence
  int side{0};               // 1 or 2: which system exhibits the witness
  std::string reason;        // Inconclusive: "fuel" or "depth"
  bool divergence_suspected{false};

  bool equivalent() const { return kind == Kind::Equivalent; }
  bool distinguished() const { return kind == Kind::Distinguished; }
  bool inconclusive() const { return kind == Kind::Inconclusive; }

  static Verdict equivalent_at(int d, bool div = false) {
    return {Kind::Equivalent, d, {}, 0, "", div};
  }
  static Verdict distinguished(CanonTrace w, int side, int d, bool div = false) {
    return {Kind::Distinguished, d, std::move(w), side, "", div};
  }
  static Verdict inconclusive(std::string why, int d, bool div = true) {
    return {Kind::Inconclusive, d, {}, 0, std::move(why), div};
  }
};

inline std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Equivalent:
      return "equivalent(depth " + std::to_string(v.depth) + ")";
    case Verdict::Kind::Distinguished:
      return "distinguished(side " + std::to_string(v.side) + ", witness " +
             to_string(v.witness) + ")";
    case Verdict::Kind::Inconclusive:
      return "inconclusive(" + v.reason + ")";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Weak steps: the tau-closure of a state (capped by fuel) and the visible
// transitions available from it.

struct WeakSteps {
  std::vector<Stepper::State> closure;  // states reachable by silent steps
  std::vector<std::pair<Action, Stepper::State>> visible;
  bool truncated{false};
};

inline WeakSteps weak_steps(const Stepper& sys, const Stepper::State& s0, int fuel) {
  WeakSteps out;
  std::set<std::string> seen;
  std::vector<Stepper::State> queue{s0};
  seen.insert(sys.literal_key(s0));
  std::size_t head = 0;
  int budget = fuel;
  while (head < queue.size()) {
    if (budget-- < 0) {
      out.truncated = true;
      break;
    }
    Stepper::State s = queue[head++];
    out.closure.push_back(s);
    for (auto& [a, s1] : sys.steps(s)) {
      if (a.is_tau()) {
        std::string k = sys.literal_key(s1);
        if (seen.insert(std::move(k)).second) queue.push_back(s1);
      } else {
        out.visible.emplace_back(std::move(a), std::move(s1));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace enumeration

struct EnumeratedTrace {
  Trace raw;                            // one raw representative
  std::vector<Stepper::State> endpoints;  // states after the trailing tau-closure
};

struct Enumeration {
  std::map<CanonTrace, EnumeratedTrace> traces;  // keyed by canonical form
  CanonTraceSet canonical;
  bool divergence_suspected{false};
};

// Full enumeration with endpoints (no memoization; desk scale).
inline Enumeration enumerate_traces_full(const Stepper& sys, const Stepper::State& s0,
                                         int depth, int fuel) {
  Enumeration out;
  struct Item {
    Stepper::State s;
    int depth;
    Trace prefix;
  };
  std::vector<Item> stack{{s0, depth, {}}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    WeakSteps ws = weak_steps(sys, it.s, fuel);
    out.divergence_suspected |= ws.truncated;
    CanonTrace ct = canonical_trace(it.prefix);
    auto [slot, inserted] = out.traces.try_emplace(ct);
    if (inserted) slot->second.raw = it.prefix;
    for (auto& e : ws.closure) slot->second.endpoints.push_back(e);
    out.canonical.insert(std::move(ct));
    if (it.depth == 0) continue;
    for (auto& [a, s1] : ws.visible) {
      Trace next = it.prefix;
      next.push_back(a);
      stack.push_back({s1, it.depth - 1, std::move(next)});
    }
  }
  return out;
}

// Set-only enumeration, memoized on (literal state key, depth).
class TraceEnumerator {
 public:
  TraceEnumerator(const Stepper& sys, int fuel) : sys_(sys), fuel_(fuel) {}

  CanonTraceSet canonical_traces(const Stepper::State& s0, int depth) {
    CanonTraceSet out;
    for (const Trace& t : suffixes(s0, depth)) out.insert(canonical_trace(t));
    return out;
  }

  bool divergence_suspected() const { return divergence_; }

 private:
  const std::vector<Trace>& suffixes(const Stepper::State& s, int depth) {
    auto key = std::make_pair(sys_.literal_key(s), depth);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Trace> out{{}};
    WeakSteps ws = weak_steps(sys_, s, fuel_);
    divergence_ |= ws.truncated;
    if (depth > 0) {
      for (auto& [a, s1] : ws.visible) {
        for (const Trace& t : suffixes(s1, depth - 1)) {
          Trace full{a};
          full.insert(full.end(), t.begin(), t.end());
          out.push_back(std::move(full));
        }
      }
    }
    return memo_.emplace(std::move(key), std::move(out)).first->second;
  }

  const Stepper& sys_;
  int fuel_;
  bool divergence_{false};
  std::map<std::pair<std::string, int>, std::vector<Trace>> memo_;
};

inline Enumeration enumerate_traces(const Stepper& sys, const Stepper::State& s0, int depth,
                                    int fuel) {
  TraceEnumerator en(sys, fuel);
  Enumeration out;
  out.canonical = en.canonical_traces(s0, depth);
  out.divergence_suspected = en.divergence_suspected();
  return out;
}

// ---------------------------------------------------------------------------
// Trace and complete-trace equivalence

namespace detail {

inline std::optional<CanonTrace> shortest_missing(const CanonTraceSet& have,
                                                  const CanonTraceSet& other) {
  std::optional<CanonTrace> best;
  for (const CanonTrace& t : have) {
    if (other.count(t)) continue;
    if (!best || t.size() < best->size() || (t.size() == best->size() && t < *best)) best = t;
  }
  return best;
}

inline Verdict compare_sets(const CanonTraceSet& a, bool diva, const CanonTraceSet& b,
                            bool divb, int depth) {
  auto wa = shortest_missing(a, b);
  auto wb = shortest_missing(b, a);
  bool div = diva || divb;
  if (!wa && !wb) {
    if (div) return Verdict::inconclusive("fuel", depth);
    return Verdict::equivalent_at(depth);
  }
  // a fuel-clipped closure on the deficient side could hide the trace
  if (wa && !divb) return Verdict::distinguished(*wa, 1, depth, div);
  if (wb && !diva) return Verdict::distinguished(*wb, 2, depth, div);
  return Verdict::inconclusive("fuel", depth);
}

}  // namespace detail

inline Verdict trace_equiv(const Stepper& sa, const Stepper::State& a, const Stepper& sb,
                           const Stepper::State& b, int depth, int fuel) {
  TraceEnumerator ea(sa, fuel), eb(sb, fuel);
  CanonTraceSet ta = ea.canonical_traces(a, depth);
  CanonTraceSet tb = eb.canonical_traces(b, depth);
  return detail::compare_sets(ta, ea.divergence_suspected(), tb, eb.divergence_suspected(),
                              depth);
}

// Complete traces: those whose endpoints are strongly passive (OGS flavors)
// or final (piI). The structural definitions are exercised as cross-checks in
// the test suites.
inline std::pair<CanonTraceSet, bool> complete_traces(const Stepper& sys,
                                                      const Stepper::State& s0, int depth,
                                                      int fuel) {
  Enumeration en = enumerate_traces_full(sys, s0, depth, fuel);
  CanonTraceSet out;
  for (const auto& [ct, et] : en.traces) {
    for (const auto& e : et.endpoints)
      if (sys.accepting(e)) {
        out.insert(ct);
        break;
      }
  }
  return {out, en.divergence_suspected};
}

inline Verdict complete_trace_equiv(const Stepper& sa, const Stepper::State& a,
                                    const Stepper& sb, const Stepper::State& b, int depth,
                                    int fuel) {
  auto [ta, diva] = complete_traces(sa, a, depth, fuel);
  auto [tb, divb] = complete_traces(sb, b, depth, fuel);
  return detail::compare_sets(ta, diva, tb, divb, depth);
}

// ---------------------------------------------------------------------------
// Bounded weak bisimulation
//
// The game: the challenger plays a strong transition on either side; the
// defender answers with a weak one (=mu=> , or silent stuttering for tau).
// Depth counts visible challenges; tau challenges consume a per-level budget.
// Challenge bound names are drawn from a band above anything the defender's
// tau-closure can allocate, so matched actions are literally equal after
// renaming the defender's successor.

class BisimChecker {
 public:
  BisimChecker(const Stepper& sa, const Stepper& sb, int fuel)
      : sa_(sa), sb_(sb), fuel_(fuel) {}

  Verdict run(const Stepper::State& a, const Stepper::State& b, int depth) {
    Result r = game(a, b, depth, fuel_);
    switch (r.kind) {
      case Result::Kind::Ok:
        return Verdict::equivalent_at(depth, divergence_);
      case Result::Kind::Fail:
        return Verdict::distinguished(canonical_trace(r.witness), r.side, depth, divergence_);
      case Result::Kind::Unknown:
        return Verdict::inconclusive("fuel", depth);
    }
    return Verdict::inconclusive("fuel", depth);
  }

 private:
  struct Result {
    enum class Kind : uint8_t { Ok, Fail, Unknown } kind{Kind::Ok};
    Trace witness;  // challenge suffix, visible and tau actions kept in order
    int side{0};
  };

  // Fresh band: above both states plus everything a fuel-bounded tau-closure
  // can allocate (at most a handful of names per expansion).
  FreshBase challenge_base(const Stepper::State& a, const Stepper::State& b) const {
    FreshBase f = sa_.state_floor(a);
    f.merge(sb_.state_floor(b));
    for (int i = 0; i < kNameKinds; ++i) f.next[i] += 4 * (fuel_ + 2) + 16;
    return f;
  }

  static bool action_shape_matches(const Action& c, const Action& d) {
    if (c.dir != d.dir) return false;
    if (c.dir != ActDir::Abs && !(c.subject == d.subject)) return false;
    if (c.objects.size() != d.objects.size()) return false;
    for (std::size_t i = 0; i < c.objects.size(); ++i)
      if (c.objects[i].kind != d.objects[i].kind) return false;
    return true;
  }

  // Align a defender successor with the challenge's bound names.
  static Stepper::State align(const Stepper& sys, const Action& challenge,
                              const Action& answer, const Stepper::State& next) {
    std::map<Name, Name> ren;
    for (std::size_t i = 0; i < challenge.objects.size(); ++i)
      if (!(answer.objects[i] == challenge.objects[i]))
        ren[answer.objects[i]] = challenge.objects[i];
    if (ren.empty()) return next;
    return sys.rename(next, ren);
  }

  Result game(const Stepper::State& a, const Stepper::State& b, int depth, int tau_budget) {
    if (depth == 0) return {};
    auto key = std::make_tuple(sa_.key(a), sb_.key(b), depth);
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      if (it->second) return *it->second;
      return {};  // in progress: assume equivalent (coinduction)
    }
    memo_[key] = std::nullopt;

    FreshBase band = challenge_base(a, b);
    Result res = half_game(sa_, a, sb_, b, 1, depth, tau_budget, band);
    if (res.kind == Result::Kind::Ok) {
      Result r2 = half_game(sb_, b, sa_, a, 2, depth, tau_budget, band);
      if (r2.kind != Result::Kind::Ok) res = r2;
    }
    memo_[key] = res;
    return res;
  }

  Result half_game(const Stepper& sc, const Stepper::State& cs, const Stepper& sd,
                   const Stepper::State& ds, int side, int depth, int tau_budget,
                   const FreshBase& band) {
    Result agg;
    WeakSteps dweak = weak_steps(sd, ds, fuel_);
    divergence_ |= dweak.truncated;
    for (auto& [mu, cnext] : sc.steps(cs, band)) {
      Result challenge_result{Result::Kind::Fail, {mu}, side};
      bool unknown_possible = dweak.truncated;
      if (mu.is_tau()) {
        if (tau_budget <= 0) {
          challenge_result = {Result::Kind::Unknown, {}, 0};
        } else {
          // defender may stay anywhere in its tau-closure
          for (const auto& dnext : dweak.closure) {
            Result sub = side == 1 ? game(cnext, dnext, depth, tau_budget - 1)
                                   : game(dnext, cnext, depth, tau_budget - 1);
            if (sub.kind == Result::Kind::Ok) {
              challenge_result = {};
              break;
            }
            if (sub.kind == Result::Kind::Unknown) unknown_possible = true;
            if (sub.kind == Result::Kind::Fail && challenge_result.witness.size() <= 1) {
              Trace w{mu};
              w.insert(w.end(), sub.witness.begin(), sub.witness.end());
              challenge_result = {Result::Kind::Fail, std::move(w), sub.side};
            }
          }
          if (challenge_result.kind == Result::Kind::Fail && unknown_possible)
            challenge_result = {Result::Kind::Unknown, {}, 0};
        }
      } else {
        for (const auto& dstate : dweak.closure) {
          for (auto& [nu, dnext] : sd.steps(dstate, band)) {
            if (!action_shape_matches(mu, nu)) continue;
            Stepper::State aligned = align(sd, mu, nu, dnext);
            Result sub = side == 1 ? game(cnext, aligned, depth - 1, fuel_)
                                   : game(aligned, cnext, depth - 1, fuel_);
            if (sub.kind == Result::Kind::Ok) {
              challenge_result = {};
              break;
            }
            if (sub.kind == Result::Kind::Unknown) unknown_possible = true;
            if (sub.kind == Result::Kind::Fail && challenge_result.kind == Result::Kind::Fail &&
                challenge_result.witness.size() <= 1) {
              // keep one failing continuation as the witness suffix
              Trace w{mu};
              w.insert(w.end(), sub.witness.begin(), sub.witness.end());
              challenge_result = {Result::Kind::Fail, std::move(w), sub.side};
            }
          }
          if (challenge_result.kind == Result::Kind::Ok) break;
        }
        if (challenge_result.kind == Result::Kind::Fail && unknown_possible)
          challenge_result = {Result::Kind::Unknown, {}, 0};
        if (challenge_result.kind == Result::Kind::Fail && challenge_result.side == 0)
          challenge_result.side = side;
      }
      if (challenge_result.kind == Result::Kind::Fail) return challenge_result;
      if (challenge_result.kind == Result::Kind::Unknown) agg = challenge_result;
    }
    return agg;
  }

  const Stepper& sa_;
  const Stepper& sb_;
  int fuel_;
  bool divergence_{false};
  std::map<std::tuple<std::string, std::string, int>, std::optional<Result>> memo_;
};

inline Verdict bounded_weak_bisim(const Stepper& sa, const Stepper::State& a,
                                  const Stepper& sb, const Stepper::State& b, int depth,
                                  int fuel) {
  return BisimChecker(sa, sb, fuel).run(a, b, depth);
}

// ---------------------------------------------------------------------------
// Interleavings

enum class InterlMode : uint8_t { Free, Alternating, WellBracketed };

inline bool trace_alternating(const Trace& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (polarity(t[i]) == polarity(t[i - 1])) return false;
  return true;
}

inline std::set<Trace> interleavings(const Trace& t1, const Trace& t2, InterlMode mode,
                                     const std::vector<Name>& sigma = {}) {
  NameSet b1 = bound_names(t1);
  NameSet b2 = bound_names(t2);
  for (const Name& n : b1.items())
    if (b2.contains(n))
      throw OgspiError("interleaved traces must have disjoint bound names");
  std::set<Trace> shuffles;
  Trace cur;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (i == t1.size() && j == t2.size()) {
      shuffles.insert(cur);
      return;
    }
    if (i < t1.size()) {
      cur.push_back(t1[i]);
      self(self, i + 1, j);
      cur.pop_back();
    }
    if (j < t2.size()) {
      cur.push_back(t2[j]);
      self(self, i, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0, 0);
  if (mode == InterlMode::Free) return shuffles;

  bool p_start = (!t1.empty() && polarity(t1.front()) == Polarity::P) ||
                 (!t2.empty() && polarity(t2.front()) == Polarity::P);
  std::set<Trace> out;
  for (const Trace& t : shuffles) {
    if (!trace_alternating(t)) continue;
    if (p_start && !t.empty() && polarity(t.front()) != Polarity::P) continue;
    if (mode == InterlMode::WellBracketed) {
      auto res = pushdown_accepts(t, sigma);
      if (!res) continue;
    }
    out.insert(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Witness replay: a Distinguished witness must replay on the exhibiting side
// and be refused by the other.

inline bool replay_witness(const Stepper& sys, const Stepper::State& s0, const CanonTrace& w,
                           int fuel) {
  struct Item {
    Stepper::State s;
    Trace prefix;
  };
  std::vector<Item> frontier{{s0, {}}};
  for (std::size_t step = 0; step < w.size(); ++step) {
    std::vector<Item> next;
    for (const auto& it : frontier) {
      WeakSteps ws = weak_steps(sys, it.s, fuel);
      for (const auto& [a, s1] : ws.visible) {
        Trace cand = it.prefix;
        cand.push_back(a);
        CanonTrace ct = canonical_trace(cand);
        if (ct.size() == step + 1 && std::equal(ct.begin(), ct.end(), w.begin())) {
          next.push_back({s1, std::move(cand)});
        }
      }
    }
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  return true;
}

}  // namespace ogspi
