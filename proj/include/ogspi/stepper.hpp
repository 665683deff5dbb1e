#pragma once

#include <memory>
#include <utility>

#include "ogspi/encode.hpp"
#include "ogspi/ogs.hpp"
#include "ogspi/pi.hpp"

namespace ogspi {

// One interface over the six LTSs: AOGS, COGS, WBOGS, CBN-OGS (alternating or
// concurrent, via the configuration mode), piI standard, piI output-prioritised.
// States are type-erased; each stepper knows its own state type. Successor
// ordering is deterministic.
class Stepper {
 public:
  using State = std::shared_ptr<const void>;

  // Explore: all silent interleavings enter the closure. Confluent: internal
  // steps commute, so one canonical path suffices (visible actions are
  // collected all along it).
  enum class TauPolicy : uint8_t { Explore, Confluent };

  virtual ~Stepper() = default;
  virtual TauPolicy tau_policy() const { return TauPolicy::Explore; }
  virtual std::string name() const = 0;
  virtual std::vector<std::pair<Action, State>> steps(const State&,
                                                      const FreshBase& floor) const = 0;
  virtual FreshBase state_floor(const State&) const = 0;
  virtual std::string key(const State&) const = 0;
  // Exact-syntax key: safe for raw-trace memoization.
  virtual std::string literal_key(const State& s) const { return key(s); }
  // Complete-trace endpoint test: strongly passive for OGS, final for piI.
  virtual bool accepting(const State&) const = 0;
  // Rename free names; targets must be fresh for the state.
  virtual State rename(const State&, const std::map<Name, Name>&) const = 0;

  std::vector<std::pair<Action, State>> steps(const State& s) const {
    return steps(s, state_floor(s));
  }
};

class AogsStepper final : public Stepper {
 public:
  static State wrap(AConfig f) { return std::make_shared<AConfig>(std::move(f)); }
  static const AConfig& get(const State& s) { return *static_cast<const AConfig*>(s.get()); }

  std::string name() const override { return "aogs"; }
  std::vector<std::pair<Action, State>> steps(const State& s,
                                              const FreshBase& floor) const override {
    std::vector<std::pair<Action, State>> out;
    for (auto& t : aogs_transitions(get(s), floor))
      out.emplace_back(std::move(t.act), wrap(std::move(t.next)));
    return out;
  }
  FreshBase state_floor(const State& s) const override { return fresh_floor(get(s)); }
  std::string key(const State& s) const override { return to_string(get(s)); }
  bool accepting(const State& s) const override { return is_strongly_passive(get(s)); }
  State rename(const State& s, const std::map<Name, Name>& m) const override {
    return wrap(config_rename(get(s), m));
  }
};

class CogsStepper final : public Stepper {
 public:
  static State wrap(CConfig f) { return std::make_shared<CConfig>(std::move(f)); }
  static const CConfig& get(const State& s) { return *static_cast<const CConfig*>(s.get()); }

  std::string name() const override { return "cogs"; }
  std::vector<std::pair<Action, State>> steps(const State& s,
                                              const FreshBase& floor) const override {
    std::vector<std::pair<Action, State>> out;
    for (auto& t : cogs_transitions(get(s), floor))
      out.emplace_back(std::move(t.act), wrap(std::move(t.next)));
    return out;
  }
  FreshBase state_floor(const State& s) const override { return fresh_floor(get(s)); }
  std::string key(const State& s) const override { return to_string(get(s)); }
  bool accepting(const State& s) const override { return is_strongly_passive(get(s)); }
  State rename(const State& s, const std::map<Name, Name>& m) const override {
    return wrap(config_rename(get(s), m));
  }
};

class WbogsStepper final : public Stepper {
 public:
  static State wrap(SConfig f) { return std::make_shared<SConfig>(std::move(f)); }
  static const SConfig& get(const State& s) { return *static_cast<const SConfig*>(s.get()); }

  std::string name() const override { return "wbogs"; }
  std::vector<std::pair<Action, State>> steps(const State& s,
                                              const FreshBase& floor) const override {
    std::vector<std::pair<Action, State>> out;
    for (auto& t : wbogs_transitions(get(s), floor))
      out.emplace_back(std::move(t.act), wrap(std::move(t.next)));
    return out;
  }
  FreshBase state_floor(const State& s) const override { return fresh_floor(get(s)); }
  std::string key(const State& s) const override { return to_string(get(s)); }
  bool accepting(const State& s) const override { return is_strongly_passive(get(s)); }
  State rename(const State& s, const std::map<Name, Name>& m) const override {
    return wrap(config_rename(get(s), m));
  }
};

// A piI agent state: either an abstraction waiting for instantiation or a
// process. Finality means no free continuation (linear receptive) names.
struct PiState {
  std::shared_ptr<const PiAbs> abs;
  Pi proc;

  static PiState of(Pi p) { return {nullptr, std::move(p)}; }
  static PiState of(PiAbs a) { return {std::make_shared<PiAbs>(std::move(a)), pi_nil()}; }
  static PiState of(const EncodedConfig& e) {
    return e.is_abstraction ? of(e.abs) : of(e.proc);
  }
};

class PiStepper final : public Stepper {
 public:
  // The processes this project enumerates come from the lambda encodings,
  // whose internal reduction is confluent; the exhaustive policy is kept for
  // the diamond cross-checks.
  explicit PiStepper(bool output_prioritised, TauPolicy tau = TauPolicy::Confluent)
      : op_(output_prioritised), tau_(tau) {}

  TauPolicy tau_policy() const override { return tau_; }

  static State wrap(PiState s) { return std::make_shared<PiState>(std::move(s)); }
  static const PiState& get(const State& s) { return *static_cast<const PiState*>(s.get()); }

  std::string name() const override { return op_ ? "pi-op" : "pi"; }

  std::vector<std::pair<Action, State>> steps(const State& s,
                                              const FreshBase& floor) const override {
    const PiState& st = get(s);
    std::vector<std::pair<Action, State>> out;
    if (st.abs) {
      for (auto& t : abs_transitions(*st.abs, floor))
        out.emplace_back(std::move(t.act), wrap(PiState::of(std::move(t.next))));
      return out;
    }
    auto ts = op_ ? pi_op_transitions(st.proc, floor) : pi_transitions(st.proc, floor);
    for (auto& t : ts) out.emplace_back(std::move(t.act), wrap(PiState::of(std::move(t.next))));
    return out;
  }

  FreshBase state_floor(const State& s) const override {
    const PiState& st = get(s);
    FreshBase base;
    if (st.abs) {
      collect_all_names(st.abs->body, base);
      for (const Name& n : st.abs->params) base.raise_above(n);
    } else {
      collect_all_names(st.proc, base);
    }
    return base;
  }

  std::string key(const State& s) const override {
    const PiState& st = get(s);
    if (st.abs) return "abs " + to_string(*st.abs);
    return canonical_key(st.proc);
  }

  std::string literal_key(const State& s) const override {
    const PiState& st = get(s);
    if (st.abs) return "abs " + to_string(*st.abs);
    return to_string(st.proc);
  }

  State rename(const State& s, const std::map<Name, Name>& m) const override {
    const PiState& st = get(s);
    if (st.abs) throw OgspiError("abstraction states are never renamed");
    return wrap(PiState::of(pi_subst(st.proc, m)));
  }

  bool accepting(const State& s) const override {
    const PiState& st = get(s);
    NameSet fn = st.abs ? [&] {
      NameSet f = free_names(st.abs->body);
      NameSet out;
      for (const Name& n : f.items()) {
        bool param = false;
        for (const Name& p : st.abs->params) param |= (p == n);
        if (!param) out.add(n);
      }
      return out;
    }()
                        : free_names(st.proc);
    for (const Name& n : fn.items())
      if (n.kind == NameKind::Continuation) return false;
    return true;
  }

 private:
  bool op_;
};

}  // namespace ogspi
