#pragma once

#include "ogspi/equiv.hpp"
#include "ogspi/reduce.hpp"

namespace ogspi {

// Lassen's eager normal-form bisimulation, as a depth-indexed game on terms,
// values, and evaluation contexts. "Both diverge" is approximated by double
// fuel exhaustion, which yields Inconclusive rather than Equivalent.
class EnfChecker {
 public:
  explicit EnfChecker(int fuel) : fuel_(fuel) {}

  Verdict terms(const Term& m1, const Term& m2, int depth) {
    Res r = term_game(m1, m2, depth);
    return finish(r, depth);
  }

 private:
  enum class Res : uint8_t { Ok, Fail, Unknown };

  Verdict finish(Res r, int depth) const {
    switch (r) {
      case Res::Ok: return Verdict::equivalent_at(depth, saw_fuel_);
      case Res::Fail: return Verdict::distinguished({}, 0, depth, saw_fuel_);
      case Res::Unknown: return Verdict::inconclusive("fuel", depth);
    }
    return Verdict::inconclusive("fuel", depth);
  }

  static Res both(Res a, Res b) {
    if (a == Res::Fail || b == Res::Fail) return Res::Fail;
    if (a == Res::Unknown || b == Res::Unknown) return Res::Unknown;
    return Res::Ok;
  }

  Res term_game(const Term& m1, const Term& m2, int depth) {
    if (depth == 0) return Res::Ok;
    EnfResult r1 = eval_enf(m1, fuel_);
    EnfResult r2 = eval_enf(m2, fuel_);
    if (std::holds_alternative<FuelExhausted>(r1) && std::holds_alternative<FuelExhausted>(r2)) {
      saw_fuel_ = true;
      return Res::Unknown;
    }
    if (std::holds_alternative<FuelExhausted>(r1) || std::holds_alternative<FuelExhausted>(r2)) {
      saw_fuel_ = true;
      return Res::Fail;  // one side converges within fuel, the other does not
    }
    if (std::holds_alternative<EnfValue>(r1) && std::holds_alternative<EnfValue>(r2))
      return value_game(std::get<EnfValue>(r1).value, std::get<EnfValue>(r2).value, depth - 1);
    if (std::holds_alternative<EnfStuck>(r1) && std::holds_alternative<EnfStuck>(r2)) {
      const EnfStuck& s1 = std::get<EnfStuck>(r1);
      const EnfStuck& s2 = std::get<EnfStuck>(r2);
      if (!(s1.head == s2.head)) return Res::Fail;
      return both(value_game(s1.arg, s2.arg, depth - 1),
                  context_game(s1.ctx, s2.ctx, depth - 1));
    }
    return Res::Fail;  // value against stuck call
  }

  Res value_game(const Term& v1, const Term& v2, int depth) {
    if (depth == 0) return Res::Ok;
    FreshBase base;
    collect_all_names(v1, base);
    collect_all_names(v2, base);
    Name x = base.make(NameKind::Variable);
    return term_game(mk_app(v1, mk_var(x)), mk_app(v2, mk_var(x)), depth);
  }

  Res context_game(const EvalContext& e1, const EvalContext& e2, int depth) {
    if (depth == 0) return Res::Ok;
    FreshBase base;
    for (const auto& f : e1) collect_all_names(f.t, base);
    for (const auto& f : e2) collect_all_names(f.t, base);
    Name x = base.make(NameKind::Variable);
    return term_game(plug(e1, mk_var(x)), plug(e2, mk_var(x)), depth);
  }

  int fuel_;
  bool saw_fuel_{false};
};

inline Verdict enf_bisim(const Term& m1, const Term& m2, int depth, int fuel) {
  return EnfChecker(fuel).terms(m1, m2, depth);
}

}  // namespace ogspi
