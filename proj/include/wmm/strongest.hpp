#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmm/checkers.hpp"
#include "wmm/explore.hpp"
#include "wmm/trace.hpp"

namespace wmm {

struct SameThread : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace strongest_detail {

struct Call {
  EventKey key;
  std::string opName;
  Value in, out;
  bool responded = false;
  std::size_t inv_pos = 0, res_pos = 0;
};

inline std::vector<Call> calls_of(const History& h) {
  std::vector<Call> calls;
  std::map<EventKey, std::size_t> where;
  for (std::size_t i = 0; i < h.ev.size(); ++i) {
    const Event& e = h.ev[i];
    if (e.kind == Event::Kind::Inv) {
      std::string s = e.label.substr(0, e.label.find('#'));
      auto dot = s.rfind('.');
      Call c;
      c.key = key_of(e);
      c.opName = dot == std::string::npos ? s : s.substr(dot + 1);
      c.in = e.value;
      c.inv_pos = i;
      where[c.key] = calls.size();
      calls.push_back(c);
    } else if (e.kind == Event::Kind::Res) {
      Call& c = calls[where.at(key_of(e))];
      c.out = e.value;
      c.responded = true;
      c.res_pos = i;
    }
  }
  return calls;
}

inline StmtP assign(const std::string& lhs, ExprP rhs) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Assign;
  s->lhs = lhs;
  s->e1 = std::move(rhs);
  return s;
}

inline StmtP fence() {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Fence;
  return s;
}

inline StmtP await_eq(const std::string& var, int v) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::Await;
  s->e1 = Expr::binary("=", Expr::var(var), Expr::constant(Value::integer(v)));
  return s;
}

inline StmtP call(const std::string& lhs, const std::string& obj,
                  const std::string& op, const Value& in) {
  auto s = std::make_shared<Stmt>();
  s->k = Stmt::K::OpCall;
  s->lhs = lhs;
  s->obj = obj;
  s->op = op;
  if (!in.is_bot()) s->e1 = Expr::constant(in);
  return s;
}

inline void number_sids(Program& p) {
  int sid = 0;
  auto walk = [&](auto&& self, const Block& b) -> void {
    for (const StmtP& sp : b.stmts) {
      const_cast<Stmt&>(*sp).sid = ++sid;
      if (sp->body) self(self, *sp->body);
      if (sp->els) self(self, *sp->els);
    }
  };
  for (Block& t : p.threads) walk(walk, t);
}

}  // namespace strongest_detail

// The client of the completeness proof: per-thread program order pins each
// thread's call sequence; fresh flag/await pairs pin every cross-thread
// response-before-invocation edge of the history; every invocation and
// response is recorded in a fresh global without delay (write + fence).
// Reserved "__" names keep the fresh globals out of the user namespace.
inline Program strongest_client_program(const History& h, const std::string& object) {
  using namespace strongest_detail;
  std::vector<Call> calls = calls_of(h);
  int threads = 1;
  for (const Event& e : h.ev) threads = std::max(threads, e.thread + 1);

  Program p;
  p.objects.push_back(object);
  std::vector<Block> blocks(threads);

  // response-before-invocation edges of the history, transitively reduced
  std::size_t n = calls.size();
  auto prec = [&](std::size_t i, std::size_t j) {
    return calls[i].responded && calls[i].res_pos < calls[j].inv_pos;
  };
  std::vector<std::pair<std::size_t, std::size_t>> syncs;  // (after i, before j)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !prec(i, j)) continue;
      if (calls[i].key.thread == calls[j].key.thread) continue;  // program order
      bool implied = false;
      for (std::size_t k = 0; k < n && !implied; ++k)
        if (k != i && k != j && prec(i, k) && prec(k, j)) implied = true;
      if (!implied) syncs.push_back({i, j});
    }

  std::vector<std::vector<std::size_t>> sync_out(n), sync_in(n);
  for (std::size_t s = 0; s < syncs.size(); ++s) {
    sync_out[syncs[s].first].push_back(s);
    sync_in[syncs[s].second].push_back(s);
    p.globals.push_back({"__sync" + std::to_string(s + 1), Value::integer(0)});
  }

  for (std::size_t k = 0; k < n; ++k) {
    const Call& c = calls[k];
    Block& b = blocks[c.key.thread];
    std::string kn = std::to_string(k + 1);
    p.globals.push_back({"__inv" + kn, Value::integer(0)});
    p.globals.push_back({"__res" + kn, Value::integer(0)});
    for (std::size_t s : sync_in[k]) b.stmts.push_back(await_eq("__sync" + std::to_string(s + 1), 1));
    b.stmts.push_back(assign("__inv" + kn, Expr::constant(Value::integer(1))));
    b.stmts.push_back(fence());
    std::string lhs = c.out.is_bot() ? "" : "r" + kn;
    b.stmts.push_back(call(lhs, object, c.opName, c.in));
    ExprP recorded = lhs.empty() ? Expr::constant(Value::integer(1)) : Expr::var(lhs);
    b.stmts.push_back(assign("__res" + kn, recorded));
    b.stmts.push_back(fence());
    for (std::size_t s : sync_out[k]) {
      b.stmts.push_back(assign("__sync" + std::to_string(s + 1), Expr::constant(Value::integer(1))));
      b.stmts.push_back(fence());
    }
  }

  p.threads = std::move(blocks);
  number_sids(p);
  return p;
}

struct StrongestResult {
  bool constructible = true;
  Program program;
};

// Builds the strongest client for h and decides constructibility by replay:
// the history must reappear as (a prefix of) the inv/res projection of some
// trace of the client over the implementation.  When the history relies on an
// operation's effect staying delayed past the synchronization fences, no such
// trace exists and there is no strongest client.
inline StrongestResult strongest_client(const History& h, const std::string& object,
                                        const ObjectImpl& impl, Model model,
                                        const Bounds& bounds) {
  StrongestResult r;
  r.program = strongest_client_program(h, object);
  Scenario sc;
  sc.name = "strongest";
  sc.model = model;
  sc.program = r.program;
  sc.impls[object] = impl;
  sc.bounds = bounds;
  ExploreResult res = enumerate_traces(sc);
  auto is_prefix = [&](const History& pre, const History& full) {
    if (pre.ev.size() > full.ev.size()) return false;
    return std::equal(pre.ev.begin(), pre.ev.end(), full.ev.begin());
  };
  r.constructible = false;
  for (const Trace& t : res.maximal)
    if (is_prefix(h, restrict_ir(t))) {
      r.constructible = true;
      break;
    }
  return r;
}

// The three-thread probe of the completeness proof's triangular-race case:
//   z=1;  ||  u=opA(x); w=z;  ||  await(z=1); v=opB(y)
// Observing w=0 together with v reveals that opA's effect was still delayed
// when opB ran.
inline Program triangular_race_probe(const History& h, const std::string& object,
                                     const std::string& opA, const std::string& opB) {
  using namespace strongest_detail;
  std::optional<Call> a, b;
  for (const Call& c : calls_of(h)) {
    if (!a && (c.key.label == opA || c.opName == opA)) a = c;
    else if (!b && (c.key.label == opB || c.opName == opB)) b = c;
  }
  if (!a || !b) throw std::runtime_error("triangular_race_probe: operation not in history");
  if (a->key.thread == b->key.thread)
    throw SameThread("triangular_race_probe: operations share a thread");

  Program p;
  p.objects.push_back(object);
  p.globals.push_back({"z", Value::integer(0)});
  p.globals.push_back({"w", Value::integer(0)});
  p.threads.resize(3);
  p.threads[0].stmts.push_back(assign("z", Expr::constant(Value::integer(1))));
  p.threads[1].stmts.push_back(call(a->out.is_bot() ? "" : "u", object, a->opName, a->in));
  p.threads[1].stmts.push_back(assign("w", Expr::var("z")));
  p.threads[2].stmts.push_back(await_eq("z", 1));
  p.threads[2].stmts.push_back(call(b->out.is_bot() ? "" : "v", object, b->opName, b->in));
  number_sids(p);
  return p;
}

// Theorem-2 direction over the bounded history set: wherever the strongest
// client's refinement against the spec passes, a linearization of the pinned
// history must exist.
inline CrosscheckReport completeness_crosscheck(const ObjectImpl& impl,
                                                const ObjectSpec& spec, Model model,
                                                const DriverShape& driver,
                                                const Bounds& bounds,
                                                const ValueDomain& domain,
                                                std::size_t max_history_events = 4) {
  CrosscheckReport rep;
  rep.name = impl.id;
  HistorySet hs = impl_histories(impl, model, bounds, driver, domain);
  rep.bound_exceeded = hs.truncated;
  for (const History& h : hs.histories) {
    // strongest clients of long histories explode combinatorially; the
    // crosscheck stays exhaustive up to this many history events / two calls
    std::size_t invs = 0;
    for (const Event& e : h.ev) invs += e.kind == Event::Kind::Inv;
    if (h.ev.size() > max_history_events || invs > 2) {
      rep.bound_exceeded = true;
      continue;
    }
    StrongestResult sr = strongest_client(h, driver.object, impl, model, bounds);
    if (!sr.constructible) {
      // proof case (ii): exhibit the reordering through a triangular race
      auto calls = strongest_detail::calls_of(h);
      bool probed = false;
      for (std::size_t i = 0; i < calls.size() && !probed; ++i)
        for (std::size_t j = 0; j < calls.size() && !probed; ++j)
          if (i != j && calls[i].key.thread != calls[j].key.thread) {
            triangular_race_probe(h, driver.object, calls[i].key.label,
                                  calls[j].key.label);
            probed = true;
          }
      continue;
    }
    Scenario sc;
    sc.name = "strongest(" + impl.id + ")";
    sc.model = model;
    sc.program = sr.program;
    sc.impls[driver.object] = impl;
    sc.spec_ids[driver.object] = spec.id;
    sc.bounds = bounds;
    RefinementVerdict rv = check_trace_refinement(sc);
    if (rv.verdict != Verdict::Fail) {
      LinVerdict lv = check_linearizability({h}, spec, domain);
      if (lv.verdict == Verdict::Fail) {
        std::string s;
        for (auto& line : render_trace(h)) s += (s.empty() ? "" : ", ") + line;
        rep.violations.push_back("refinement holds but no linearization of " + s);
      }
    }
    ++rep.checked;
  }
  return rep;
}

}  // namespace wmm
