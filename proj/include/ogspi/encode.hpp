#pragma once

#include "ogspi/ogs.hpp"
#include "ogspi/pi.hpp"

namespace ogspi {

enum class EncVariant : uint8_t { Plain, Opt };

// Internal nu-names are derived deterministically from the encoded fragment
// itself, so the encoding of an environment entry depends on that entry only.
// This is what makes [[F (x) G]] == [[F]] | [[G]] literal after normalize.

namespace detail {

inline FreshBase enc_floor(const Term& t, std::initializer_list<Name> extra) {
  FreshBase base;
  collect_all_names(t, base);
  for (const Name& n : extra) base.raise_above(n);
  return base;
}

inline Pi cbv_value_body(const Term& v, Name y, FreshBase& base, EncVariant variant);

// [[M]]<p> for call-by-value, plain variant.
inline Pi cbv_term_plain(const Term& m, Name p, FreshBase& base) {
  if (is_value(m, CalcMode::Cbv)) {
    Name y = base.make(NameKind::Variable);
    return pi_output(p, {y}, cbv_value_body(m, y, base, EncVariant::Plain));
  }
  // M N: run the function, then the argument, then connect them
  Name q = base.make(NameKind::Continuation);
  Name y = base.make(NameKind::Variable);
  Name r = base.make(NameKind::Continuation);
  Name w = base.make(NameKind::Variable);
  Name w1 = base.make(NameKind::Variable);
  Name p1 = base.make(NameKind::Continuation);
  Pi fun = cbv_term_plain(m->a, q, base);
  Pi arg = cbv_term_plain(m->b, r, base);
  Pi call = pi_output(y, {w1, p1},
                      pi_par(make_forwarder(w1, w, CalcMode::Cbv),
                             make_forwarder(p1, p, CalcMode::Cbv)));
  return pi_res(q, pi_par(fun, pi_input(q, {y}, pi_res(r, pi_par(arg, pi_input(r, {w}, call))))));
}

inline Pi cbv_term_opt(const Term& m, Name p, FreshBase& base);

// The shared call scaffold y^(w',r').(w' |> w | r' |> p).
inline Pi opt_call(Name y, Name w, Name p, FreshBase& base) {
  Name w1 = base.make(NameKind::Variable);
  Name r1 = base.make(NameKind::Continuation);
  return pi_output(y, {w1, r1},
                   pi_par(make_forwarder(w1, w, CalcMode::Cbv),
                          make_forwarder(r1, p, CalcMode::Cbv)));
}

// [[M]]<p>, optimised: case analysis on value positions in applications.
inline Pi cbv_term_opt(const Term& m, Name p, FreshBase& base) {
  if (is_value(m, CalcMode::Cbv)) {
    Name y = base.make(NameKind::Variable);
    return pi_output(p, {y}, cbv_value_body(m, y, base, EncVariant::Opt));
  }
  const Term& f = m->a;
  const Term& a = m->b;
  bool fv = is_value(f, CalcMode::Cbv);
  bool av = is_value(a, CalcMode::Cbv);
  if (fv && av) {
    if (f->kind == TermKind::Var) {
      // x V: interrogate x directly
      Name z = base.make(NameKind::Variable);
      Name q = base.make(NameKind::Continuation);
      return pi_output(f->name, {z, q},
                       pi_par(cbv_value_body(a, z, base, EncVariant::Opt),
                              make_forwarder(q, p, CalcMode::Cbv)));
    }
    // (\x.M) V
    Name y = base.make(NameKind::Variable);
    Name w = base.make(NameKind::Variable);
    Pi call = opt_call(y, w, p, base);
    return pi_res(y, pi_res(w, pi_par(cbv_value_body(f, y, base, EncVariant::Opt),
                                      pi_par(cbv_value_body(a, w, base, EncVariant::Opt),
                                             call))));
  }
  if (fv) {
    // V M, M not a value
    Name y = base.make(NameKind::Variable);
    Name r = base.make(NameKind::Continuation);
    Name w = base.make(NameKind::Variable);
    Pi call = opt_call(y, w, p, base);
    Pi arg = cbv_term_opt(a, r, base);
    return pi_res(y, pi_par(cbv_value_body(f, y, base, EncVariant::Opt),
                            pi_res(r, pi_par(arg, pi_input(r, {w}, call)))));
  }
  if (av) {
    // M V, M not a value
    Name q = base.make(NameKind::Continuation);
    Name y = base.make(NameKind::Variable);
    Name w = base.make(NameKind::Variable);
    Pi call = opt_call(y, w, p, base);
    Pi fun = cbv_term_opt(f, q, base);
    return pi_res(q, pi_par(fun, pi_input(q, {y},
                                          pi_res(w, pi_par(cbv_value_body(a, w, base,
                                                                          EncVariant::Opt),
                                                           call)))));
  }
  // M N, neither a value
  Name q = base.make(NameKind::Continuation);
  Name y = base.make(NameKind::Variable);
  Name r = base.make(NameKind::Continuation);
  Name w = base.make(NameKind::Variable);
  Pi call = opt_call(y, w, p, base);
  Pi fun = cbv_term_opt(f, q, base);
  Pi arg = cbv_term_opt(a, r, base);
  return pi_res(q, pi_par(fun, pi_input(q, {y}, pi_res(r, pi_par(arg, pi_input(r, {w}, call))))));
}

inline Pi cbv_term(const Term& m, Name p, FreshBase& base, EncVariant v) {
  return v == EncVariant::Plain ? cbv_term_plain(m, p, base) : cbv_term_opt(m, p, base);
}

// Vv[[V]] at access name y: replicated body for lambdas, a link for variables.
inline Pi cbv_value_body(const Term& v, Name y, FreshBase& base, EncVariant variant) {
  if (v->kind == TermKind::Var) return make_forwarder(y, v->name, CalcMode::Cbv);
  if (v->kind != TermKind::Lam) throw OgspiError("not a cbv value: " + to_string(v));
  Name q = base.make(NameKind::Continuation);
  return pi_input(y, {v->name, q}, cbv_term(v->a, q, base, variant), /*replicated=*/true);
}

}  // namespace detail

inline PiAbs encode_cbv(const Term& m, EncVariant variant = EncVariant::Plain) {
  FreshBase base = detail::enc_floor(m, {});
  Name p = base.make(NameKind::Continuation);
  return {{p}, detail::cbv_term(m, p, base, variant)};
}

inline PiAbs encode_cbv_opt(const Term& m) { return encode_cbv(m, EncVariant::Opt); }

inline Pi encode_cbv_at(const Term& m, Name p, EncVariant variant = EncVariant::Plain) {
  FreshBase base = detail::enc_floor(m, {p});
  return detail::cbv_term(m, p, base, variant);
}

inline Pi encode_value_at(const Term& v, Name y, EncVariant variant = EncVariant::Plain) {
  FreshBase base = detail::enc_floor(v, {y});
  return detail::cbv_value_body(v, y, base, variant);
}

// ---------------------------------------------------------------------------
// Call-by-name

namespace detail {

inline Pi cbn_term(const Term& m, Name p, FreshBase& base);

// [[ [q |-> (E,p)] ]]: a link for the empty context, otherwise the
// interrogation of the next argument frame.
inline Pi cbn_cont_entry(const EvalContext& e, Name q, Name p, FreshBase& base) {
  if (e.empty()) return make_forwarder(q, p, CalcMode::Cbn);
  EvalContext outer(e.begin(), e.end() - 1);
  const Term& m = e.back().t;  // E = E'[[.] M]
  Name v = base.make(NameKind::ValueName);
  Name x = base.make(NameKind::Variable);
  Name r = base.make(NameKind::Continuation);
  Name q1 = base.make(NameKind::Continuation);
  Pi arg = pi_input(x, {q1}, cbn_term(m, q1, base), /*replicated=*/true);
  return pi_input(q, {v}, pi_output(v, {x, r}, pi_par(cbn_cont_entry(outer, r, p, base), arg)));
}

inline Pi cbn_term(const Term& m, Name p, FreshBase& base) {
  Decomp d = decompose_cbn(m);
  switch (d.head) {
    case Decomp::Head::Value: {
      if (d.fun->kind == TermKind::ValName) {
        Name w = base.make(NameKind::ValueName);
        return pi_output(p, {w}, make_forwarder(w, d.fun->name, CalcMode::Cbn));
      }
      Name v = base.make(NameKind::ValueName);
      Name q = base.make(NameKind::Continuation);
      return pi_output(p, {v}, pi_input(v, {d.fun->name, q}, cbn_term(d.fun->a, q, base)));
    }
    case Decomp::Head::TermStuck: {  // E[x] = (p) x^(q). [[ [q |-> (E,p)] ]]
      Name q = base.make(NameKind::Continuation);
      return pi_output(d.fun->name, {q}, cbn_cont_entry(d.ctx, q, p, base));
    }
    case Decomp::Head::Callback: {  // E[v M]
      Name x = base.make(NameKind::Variable);
      Name r = base.make(NameKind::Continuation);
      Name q = base.make(NameKind::Continuation);
      Pi arg = pi_input(x, {q}, cbn_term(d.arg, q, base), /*replicated=*/true);
      return pi_output(d.fun->name, {x, r}, pi_par(cbn_cont_entry(d.ctx, r, p, base), arg));
    }
    case Decomp::Head::Beta: {  // structural application clause on the outer App
      const Term& f = m->a;
      const Term& a = m->b;
      Name q = base.make(NameKind::Continuation);
      Name v = base.make(NameKind::ValueName);
      Name x = base.make(NameKind::Variable);
      Name p1 = base.make(NameKind::Continuation);
      Name r = base.make(NameKind::Continuation);
      Pi arg = pi_input(x, {r}, cbn_term(a, r, base), /*replicated=*/true);
      Pi call = pi_output(v, {x, p1}, pi_par(make_forwarder(p1, p, CalcMode::Cbn), arg));
      return pi_res(q, pi_par(cbn_term(f, q, base), pi_input(q, {v}, call)));
    }
    default:
      throw OgspiError("cbn encoding: unexpected term shape " + to_string(m));
  }
}

}  // namespace detail

inline PiAbs encode_cbn(const Term& m) {
  FreshBase base = detail::enc_floor(m, {});
  Name p = base.make(NameKind::Continuation);
  return {{p}, detail::cbn_term(m, p, base)};
}

inline Pi encode_cbn_at(const Term& m, Name p) {
  FreshBase base = detail::enc_floor(m, {p});
  return detail::cbn_term(m, p, base);
}

// ---------------------------------------------------------------------------
// Environments and configurations

inline Pi encode_entry(const EnvEntry& e, CalcMode mode, EncVariant variant) {
  if (mode == CalcMode::Cbn) {
    switch (e.sort) {
      case EnvEntry::Sort::Value: {
        if (e.value->kind == TermKind::ValName)
          return make_forwarder(e.key, e.value->name, CalcMode::Cbn);
        FreshBase base = detail::enc_floor(e.value, {e.key});
        Name q = base.make(NameKind::Continuation);
        return pi_input(e.key, {e.value->name, q}, detail::cbn_term(e.value->a, q, base));
      }
      case EnvEntry::Sort::TermB: {
        FreshBase base = detail::enc_floor(e.value, {e.key});
        Name q = base.make(NameKind::Continuation);
        return pi_input(e.key, {q}, detail::cbn_term(e.value, q, base), /*replicated=*/true);
      }
      case EnvEntry::Sort::Cont: {
        FreshBase base;
        for (const auto& fr : e.ctx) collect_all_names(fr.t, base);
        base.raise_above(e.key);
        base.raise_above(e.ret);
        return detail::cbn_cont_entry(e.ctx, e.key, e.ret, base);
      }
    }
  }
  switch (e.sort) {
    case EnvEntry::Sort::Value:
      return encode_value_at(e.value, e.key, variant);
    case EnvEntry::Sort::Cont: {
      FreshBase base;
      for (const auto& fr : e.ctx) collect_all_names(fr.t, base);
      base.raise_above(e.key);
      base.raise_above(e.ret);
      Name x = base.make(NameKind::Variable);
      Term plugged = plug(e.ctx, mk_var(x));
      return pi_input(e.key, {x}, detail::cbv_term(plugged, e.ret, base, variant));
    }
    default:
      throw OgspiError("term bindings are cbn-only");
  }
}

inline Pi encode_env(const Environment& env, CalcMode mode, EncVariant variant) {
  Pi out = pi_nil();
  for (auto it = env.entries.rbegin(); it != env.entries.rend(); ++it)
    out = pi_par(encode_entry(*it, mode, variant), out);
  return out;
}

// The encoding of a configuration does not depend on its name support.
// Initial configurations encode to the bare abstraction.
struct EncodedConfig {
  bool is_abstraction{false};
  PiAbs abs;  // when is_abstraction
  Pi proc;    // otherwise
};

inline EncodedConfig encode_config(const AConfig& f, EncVariant variant = EncVariant::Plain) {
  check_valid(f);
  if (f.phase == AConfig::Phase::Initial) {
    if (f.mode == CalcMode::Cbn) return {true, encode_cbn(f.term), pi_nil()};
    return {true, encode_cbv(f.term, variant), pi_nil()};
  }
  Pi env = encode_env(f.env, f.mode, variant);
  if (f.phase == AConfig::Phase::Passive) return {false, {}, env};
  Pi body = f.mode == CalcMode::Cbn ? encode_cbn_at(f.term, f.cont)
                                    : encode_cbv_at(f.term, f.cont, variant);
  return {false, {}, pi_par(body, env)};
}

inline EncodedConfig encode_config(const CConfig& f, EncVariant variant = EncVariant::Plain) {
  check_valid(f);
  if (f.initial) {
    if (f.mode == CalcMode::Cbn) return {true, encode_cbn(f.init_term), pi_nil()};
    return {true, encode_cbv(f.init_term, variant), pi_nil()};
  }
  Pi out = encode_env(f.env, f.mode, variant);
  for (auto it = f.threads.rbegin(); it != f.threads.rend(); ++it) {
    Pi body = f.mode == CalcMode::Cbn ? encode_cbn_at(it->second, it->first)
                                      : encode_cbv_at(it->second, it->first, variant);
    out = pi_par(body, out);
  }
  return {false, {}, out};
}

}  // namespace ogspi
