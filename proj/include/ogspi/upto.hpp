#pragma once

#include "ogspi/equiv.hpp"

namespace ogspi {

// Bisimulation up-to reduction and composition for COGS. After every matched
// visible step both successors are decomposed into singleton configurations
// and the game continues pairwise, memoizing singleton pairs. Sound by the
// corresponding up-to theorem; the checker's verdicts are cross-checked
// against the plain bounded bisimulation in the property suites.
struct UptoStats {
  int memo_hits{0};
  int pairs_played{0};
};

class UptoCompositionChecker {
 public:
  UptoCompositionChecker(int fuel) : fuel_(fuel) {}

  Verdict run(const CConfig& f, const CConfig& g, int depth, UptoStats* stats = nullptr) {
    if (!support_equivalent(f, g))
      throw InvalidConfiguration("bisim_upto_composition requires support-equivalent inputs");
    Res r = split_game(f, g, depth);
    if (stats) *stats = stats_;
    switch (r.kind) {
      case Res::Kind::Ok: return Verdict::equivalent_at(depth, divergence_);
      case Res::Kind::Fail:
        return Verdict::distinguished(canonical_trace(r.witness), r.side, depth, divergence_);
      case Res::Kind::Unknown: return Verdict::inconclusive("fuel", depth);
    }
    return Verdict::inconclusive("fuel", depth);
  }

 private:
  struct Res {
    enum class Kind : uint8_t { Ok, Fail, Unknown } kind{Kind::Ok};
    Trace witness;
    int side{0};
  };

  static std::string singleton_print(const CConfig& f) {
    std::string s = f.mode == CalcMode::Cbn ? "n:" : "v:";
    for (const auto& t : f.threads) s += to_string(t.first) + " |-> " + to_string(t.second);
    for (const auto& e : f.env.entries) s += to_string(e);
    return s;
  }

  static Name p_name(const CConfig& f) {
    if (!f.threads.empty()) return f.threads.front().first;
    return f.env.entries.front().key;
  }

  // Decompose both successors and continue pairwise on matching P-names.
  Res split_game(const CConfig& f, const CConfig& g, int depth) {
    std::vector<CConfig> fs = decompose_singletons(f);
    std::vector<CConfig> gs = decompose_singletons(g);
    if (fs.size() != gs.size()) return {Res::Kind::Fail, {}, 1};
    Res agg;
    for (const CConfig& fc : fs) {
      const CConfig* gc = nullptr;
      for (const CConfig& c : gs)
        if (p_name(c) == p_name(fc)) {
          gc = &c;
          break;
        }
      if (!gc) return {Res::Kind::Fail, {}, 1};
      Res sub = pair_game(fc, *gc, depth);
      if (sub.kind == Res::Kind::Fail) return sub;
      if (sub.kind == Res::Kind::Unknown) agg = sub;
    }
    return agg;
  }

  Res pair_game(const CConfig& f, const CConfig& g, int depth) {
    if (depth == 0) return {};
    ++stats_.pairs_played;
    auto key = std::make_pair(singleton_print(f), singleton_print(g));
    // dominance: Ok at d' >= d covers d; Fail at d' <= d persists at d
    auto it = done_.find(key);
    if (it != done_.end()) {
      for (const auto& [d, r] : it->second) {
        if (r.kind == Res::Kind::Ok && d >= depth) {
          ++stats_.memo_hits;
          return r;
        }
        if (r.kind == Res::Kind::Fail && d <= depth) {
          ++stats_.memo_hits;
          return r;
        }
      }
    }
    auto ip = in_progress_.find(key);
    if (ip != in_progress_.end() && ip->second >= depth) {
      ++stats_.memo_hits;
      return {};  // coinductive assumption
    }
    int prev = ip == in_progress_.end() ? -1 : ip->second;
    in_progress_[key] = depth;

    FreshBase band = fresh_floor(f);
    band.merge(fresh_floor(g));
    for (int i = 0; i < kNameKinds; ++i) band.next[i] += 4 * (fuel_ + 2) + 16;

    Res res = half(f, g, 1, depth, band);
    if (res.kind == Res::Kind::Ok) {
      Res r2 = half(g, f, 2, depth, band);
      if (r2.kind != Res::Kind::Ok) res = r2;
    }

    if (prev < 0)
      in_progress_.erase(key);
    else
      in_progress_[key] = prev;
    done_[key].emplace_back(depth, res);
    return res;
  }

  // Weak visible challenges of the challenger singleton; per-thread reduction
  // is deterministic, so silent prefixes are linear.
  struct WeakVisible {
    std::vector<std::pair<Action, CConfig>> steps;
    bool truncated{false};
  };

  WeakVisible weak_visible(const CConfig& f, const FreshBase& band) {
    WeakVisible out;
    std::set<std::string> seen;
    std::vector<CConfig> queue{f};
    seen.insert(to_string(f));
    std::size_t head = 0;
    int budget = fuel_;
    while (head < queue.size()) {
      if (budget-- < 0) {
        out.truncated = true;
        break;
      }
      CConfig s = queue[head++];
      for (auto& t : cogs_transitions(s, band)) {
        if (t.act.is_tau()) {
          if (seen.insert(to_string(t.next)).second) queue.push_back(std::move(t.next));
        } else {
          out.steps.emplace_back(std::move(t.act), std::move(t.next));
        }
      }
    }
    return out;
  }

  Res half(const CConfig& c, const CConfig& d, int side, int depth, const FreshBase& band) {
    WeakVisible cw = weak_visible(c, band);
    WeakVisible dw = weak_visible(d, band);
    divergence_ |= cw.truncated || dw.truncated;
    Res agg;
    for (auto& [mu, cnext] : cw.steps) {
      Res challenge{Res::Kind::Fail, {mu}, side};
      bool unknown_possible = dw.truncated;
      for (auto& [nu, dnext] : dw.steps) {
        if (!(mu == nu)) continue;  // same band: matched actions are literal
        Res sub = side == 1 ? split_game(cnext, dnext, depth - 1)
                            : split_game(dnext, cnext, depth - 1);
        if (sub.kind == Res::Kind::Ok) {
          challenge = {};
          break;
        }
        if (sub.kind == Res::Kind::Unknown) unknown_possible = true;
        if (sub.kind == Res::Kind::Fail && challenge.witness.size() <= 1) {
          Trace w{mu};
          w.insert(w.end(), sub.witness.begin(), sub.witness.end());
          challenge = {Res::Kind::Fail, std::move(w), sub.side};
        }
      }
      if (challenge.kind == Res::Kind::Fail && unknown_possible)
        challenge = {Res::Kind::Unknown, {}, 0};
      if (challenge.kind == Res::Kind::Fail) return challenge;
      if (challenge.kind == Res::Kind::Unknown) agg = challenge;
    }
    return agg;
  }

  int fuel_;
  bool divergence_{false};
  UptoStats stats_;
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<int, Res>>> done_;
  std::map<std::pair<std::string, std::string>, int> in_progress_;
};

inline Verdict bisim_upto_composition(const CConfig& f, const CConfig& g, int depth, int fuel,
                                      UptoStats* stats = nullptr) {
  return UptoCompositionChecker(fuel).run(f, g, depth, stats);
}

}  // namespace ogspi
