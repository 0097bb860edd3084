#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmm/drivers.hpp"
#include "wmm/explore.hpp"
#include "wmm/objects.hpp"
#include "wmm/trace.hpp"

namespace wmm {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

// --- linearizability ---------------------------------------------------------

struct LinWitness {
  History h, hplus, hprime;  // comp(hplus) ~ hprime, precedence respected
};

struct LinVerdict {
  Verdict verdict = Verdict::Pass;
  std::vector<LinWitness> witnesses;  // one per checked history on pass
  History failing;                    // on fail
  bool bound_exceeded = false;        // inputs were truncated
};

namespace lin_detail {

struct CallRec {
  EventKey key;
  std::string opName;
  Value in, out;
  std::size_t inv_pos = 0, res_pos = 0;
};

inline std::string op_of_label(const std::string& label) {
  std::string s = label.substr(0, label.find('#'));
  auto dot = s.rfind('.');
  return dot == std::string::npos ? s : s.substr(dot + 1);
}

// Complete histories only (every invocation responded).
inline std::vector<CallRec> calls_of(const History& h) {
  std::vector<CallRec> calls;
  std::map<EventKey, std::size_t> where;
  for (std::size_t i = 0; i < h.ev.size(); ++i) {
    const Event& e = h.ev[i];
    if (e.kind == Event::Kind::Inv) {
      where[key_of(e)] = calls.size();
      calls.push_back({key_of(e), op_of_label(e.label), e.value, Value::bot(), i, 0});
    } else if (e.kind == Event::Kind::Res) {
      CallRec& c = calls[where.at(key_of(e))];
      c.out = e.value;
      c.res_pos = i;
    }
  }
  return calls;
}

// Incremental linearization: schedule calls one by one, respecting the
// response-before-invocation order of the history, while simulating the
// specification automaton and matching recorded outputs.
inline std::optional<History> linearize_complete(const History& hc,
                                                 const ObjectSpec& spec) {
  std::vector<CallRec> calls = calls_of(hc);
  std::size_t n = calls.size();
  // preds[i]: calls whose response precedes i's invocation
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && calls[j].res_pos < calls[i].inv_pos) preds[i].push_back(j);

  std::set<std::pair<SpecState, std::vector<bool>>> dead;
  std::vector<std::size_t> order;

  auto rec = [&](auto&& self, const SpecState& s, std::vector<bool>& done,
                 std::size_t left) -> bool {
    if (left == 0) return true;
    if (dead.count({s, done})) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (std::size_t j : preds[i])
        if (!done[j]) { ready = false; break; }
      if (!ready) continue;
      for (auto& [s2, out] : spec.step(calls[i].opName, s, calls[i].in)) {
        if (out != calls[i].out) continue;
        done[i] = true;
        order.push_back(i);
        if (self(self, s2, done, left - 1)) return true;
        order.pop_back();
        done[i] = false;
      }
    }
    dead.insert({s, done});
    return false;
  };

  std::vector<bool> done(n, false);
  if (!rec(rec, spec.init, done, n)) return std::nullopt;
  History hp;
  for (std::size_t i : order) {
    hp.ev.push_back(inv_ev(calls[i].key.thread, calls[i].key.label, calls[i].in));
    hp.ev.push_back(res_ev(calls[i].key.thread, calls[i].key.label, calls[i].out));
  }
  return hp;
}

}  // namespace lin_detail

// Searches an extension h+ of h and a sequential spec history h' with
// comp(h+) ~ h' and the operation order of comp(h+) contained in that of h'.
inline std::optional<LinWitness> linearize(const History& h, const ObjectSpec& spec,
                                           const ValueDomain& domain) {
  for (const Trace& hplus : ext(h, domain)) {
    History hc = comp(hplus);
    if (auto hp = lin_detail::linearize_complete(hc, spec))
      return LinWitness{h, hplus, *hp};
  }
  return std::nullopt;
}

inline LinVerdict check_linearizability(const std::set<History>& hists,
                                        const ObjectSpec& spec,
                                        const ValueDomain& domain,
                                        bool inputs_truncated = false) {
  LinVerdict v;
  v.bound_exceeded = inputs_truncated;
  for (const History& h : hists) {
    auto w = linearize(h, spec, domain);
    if (!w) {
      v.verdict = Verdict::Fail;
      v.failing = h;
      v.witnesses.clear();
      return v;
    }
    v.witnesses.push_back(std::move(*w));
  }
  v.verdict = inputs_truncated ? Verdict::Inconclusive : Verdict::Pass;
  return v;
}

// Linearizability of the histories a scenario induces on an object: driver
// scenarios use the generated driver clients, plain scenarios the inv/res
// projections of the program's own traces.
inline LinVerdict check_scenario_linearizability(const Scenario& sc,
                                                 const std::string& object) {
  auto sit = sc.spec_ids.find(object);
  std::string id = sit != sc.spec_ids.end()
                       ? sit->second
                       : default_spec_for(sc.impls.count(object) ? sc.impls.at(object).id : "");
  const ObjectSpec* spec = find_spec(id);
  if (!spec) throw ParseError("no specification bound for object '" + object + "'");
  std::set<History> hists;
  bool truncated = false;
  if (sc.driver) {
    HistorySet hs = impl_histories(sc.impls.at(object), sc.model, sc.bounds,
                                   *sc.driver, sc.program.vals);
    hists = std::move(hs.histories);
    truncated = hs.truncated;
  } else {
    ProjectedResult r = induced_histories(sc);
    std::string prefix = object + ".";
    for (const Trace& h : r.projected) {
      History f;
      for (const Event& e : h.ev)
        if (e.label.rfind(prefix, 0) == 0) f.ev.push_back(e);
      hists.insert(std::move(f));
    }
    truncated = r.truncated;
  }
  return check_linearizability(hists, *spec, sc.program.vals, truncated);
}

// Brute-force oracle: enumerate sequential spec histories outright and test
// the definition literally.  Must agree with the incremental search.
inline bool lin_bruteforce(const History& h, const ObjectSpec& spec,
                           const std::string& object, int threads, int max_ops,
                           const ValueDomain& inputs, const ValueDomain& domain) {
  auto spec_hs = spec_histories(spec, object, threads, max_ops, inputs);
  for (const Trace& hplus : ext(h, domain)) {
    History hc = comp(hplus);
    for (const History& hp : spec_hs)
      if (thread_equivalent(hc, hp) && precedence_subset(hc, hp)) return true;
  }
  return false;
}

// --- weak-memory trace refinement ---------------------------------------------

struct RefinementVerdict {
  Verdict verdict = Verdict::Pass;
  std::string scenario;
  Trace counterexample;             // minimal failing trace
  Events counterexample_obs;
  std::set<Events> concrete_obs, abstract_obs;
  bool concrete_truncated = false, abstract_truncated = false;
};

inline RefinementVerdict check_trace_refinement(const Scenario& sc) {
  RefinementVerdict v;
  v.scenario = sc.name;
  ProjectedResult conc = concrete_obs(sc);
  ProjectedResult abst = abstract_obs(sc);
  v.concrete_truncated = conc.truncated;
  v.abstract_truncated = abst.truncated;
  for (const Trace& o : conc.projected) v.concrete_obs.insert(o.ev);
  for (const Trace& o : abst.projected) v.abstract_obs.insert(o.ev);

  std::set<Events> missing;
  for (const Events& o : v.concrete_obs)
    if (!v.abstract_obs.count(o)) missing.insert(o);

  if (missing.empty()) {
    v.verdict = (conc.truncated || abst.truncated) ? Verdict::Inconclusive
                                                   : Verdict::Pass;
    return v;
  }
  if (abst.truncated) {
    // a matching abstract trace may exist beyond the bound
    v.verdict = Verdict::Inconclusive;
    return v;
  }
  v.verdict = Verdict::Fail;
  // exhibit the shortest concrete trace behind some unmatched behaviour
  ExploreResult full = enumerate_traces(sc);
  bool first = true;
  for (const Trace& t : full.maximal) {
    if (!missing.count(obs(t))) continue;
    auto better = [&](const Trace& a, const Trace& b) {
      if (a.ev.size() != b.ev.size()) return a.ev.size() < b.ev.size();
      return render_trace(a) < render_trace(b);
    };
    if (first || better(t, v.counterexample)) {
      v.counterexample = t;
      v.counterexample_obs = obs(t);
      first = false;
    }
  }
  return v;
}

// Bounded object refinement over a program suite: a fail anywhere refutes;
// a pass is evidence within bounds only.
inline RefinementVerdict check_object_refinement(const std::vector<Scenario>& suite) {
  RefinementVerdict agg;
  bool inconclusive = false;
  for (const Scenario& sc : suite) {
    RefinementVerdict v = check_trace_refinement(sc);
    if (v.verdict == Verdict::Fail) return v;
    if (v.verdict == Verdict::Inconclusive) inconclusive = true;
    agg.concrete_truncated |= v.concrete_truncated;
    agg.abstract_truncated |= v.abstract_truncated;
  }
  agg.verdict = inconclusive ? Verdict::Inconclusive : Verdict::Pass;
  return agg;
}

// --- the soundness-proof transformation ----------------------------------------

struct TransError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reorders the object events of t (a completed trace: every invocation has a
// response) so operations form contiguous inv/effop/res triples in the order
// of hprime, preserving program-event order.  The remainder r holds
// invocations awaiting placement.
inline Trace trans(const Trace& t, const History& hprime, Events r = {}) {
  std::map<EventKey, Value> res_out;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Res) res_out[key_of(e)] = e.value;

  Trace out;
  std::size_t i = 0, j = 0;
  auto in_r = [&](const Event& e) {
    return std::find(r.begin(), r.end(), e) != r.end();
  };
  auto emit_triple = [&](const Event& inv) {
    auto it = res_out.find(key_of(inv));
    if (it == res_out.end())
      throw TransError("trans: no response for " + render_event(inv));
    out.ev.push_back(inv);
    out.ev.push_back(effop_ev(inv.thread, inv.label, it->second));
    out.ev.push_back(res_ev(inv.thread, inv.label, it->second));
    j += 2;  // h' consumes its inv/res pair
  };

  std::size_t guard = 3 * (t.ev.size() + hprime.ev.size()) + 8;
  while (guard--) {
    const Event* hh = j < hprime.ev.size() ? &hprime.ev[j] : nullptr;
    if (hh && in_r(*hh)) {  // (T5)
      Event inv = *hh;
      emit_triple(inv);
      r.erase(std::find(r.begin(), r.end(), inv));
      continue;
    }
    if (i >= t.ev.size()) {
      if (!hh && r.empty()) return out;
      throw TransError("trans: history and trace are not thread-equivalent");
    }
    const Event& e = t.ev[i];
    switch (e.kind) {
      case Event::Kind::Inv:
        if (hh && *hh == e) emit_triple(e);  // (T1)
        else r.push_back(e);                 // (T2)
        ++i;
        break;
      case Event::Kind::Res:
      case Event::Kind::EffOp:
        ++i;  // (T3)
        break;
      case Event::Kind::Step:
      case Event::Kind::Eff:
        out.ev.push_back(e);  // (T4); (T5) above covers the r-head case
        ++i;
        break;
    }
  }
  throw TransError("trans: no progress (precondition violated)");
}

// --- theorem crosschecks --------------------------------------------------------

struct CrosscheckReport {
  std::string name;
  int checked = 0;
  bool bound_exceeded = false;
  std::vector<std::string> violations;  // empty = consistent with the theorem
  bool ok() const { return violations.empty(); }
};

// Theorem-1 direction: if the implementation's histories linearize to the
// spec, refinement must pass on every client of the suite.
inline CrosscheckReport soundness_crosscheck(const ObjectImpl& impl,
                                             const ObjectSpec& spec, Model model,
                                             const DriverShape& driver,
                                             const std::vector<Scenario>& suite,
                                             const Bounds& bounds,
                                             const ValueDomain& domain) {
  CrosscheckReport rep;
  rep.name = impl.id;
  HistorySet hs = impl_histories(impl, model, bounds, driver, domain);
  rep.bound_exceeded = hs.truncated;
  LinVerdict lin = check_linearizability(hs.histories, spec, domain, hs.truncated);
  rep.checked = static_cast<int>(hs.histories.size());
  if (lin.verdict == Verdict::Fail) return rep;  // antecedent false: nothing to check
  for (const Scenario& sc : suite) {
    RefinementVerdict rv = check_trace_refinement(sc);
    if (rv.verdict == Verdict::Fail)
      rep.violations.push_back("lin holds but refinement fails on " + sc.name);
  }
  return rep;
}

}  // namespace wmm
