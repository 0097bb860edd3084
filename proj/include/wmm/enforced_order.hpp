#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wmm/explore.hpp"
#include "wmm/partial_order.hpp"
#include "wmm/program.hpp"

namespace wmm {

// The enforced order of a program under a memory model constrains events, not
// executions, so it is built per control-flow path: a path fixes branch
// outcomes, loop iteration counts and the value carried by each write and
// operation response (the events of different paths are distinct).  Each path
// event below materialises as step/eff or inv/res/effop pairs.
struct PathEvent {
  enum class K { Write, Branch, Await, Fence, CFence, OpCall };
  K k = K::Write;
  std::string label;       // counted step label, or the call label for OpCall

  // Write / Await bookkeeping for coherence and synchronisation edges.
  std::string var;         // Write: global written; Await: variable compared
  Value wval;              // Write: value written; Await: value compared for
  bool sync = false;       // Await of the shape var = const
  bool drains = false;     // Write performed by an atomic (tas/cas)
  std::set<int> deps;      // Write: OpCall positions whose result feeds the value

  Value in, out;           // OpCall
  bool writes = true;      // OpCall: leaves a store behind on every path
};

using ThreadPath = std::vector<PathEvent>;

struct Path {
  std::vector<ThreadPath> threads;
};

namespace order_detail {

// Static expression evaluation over the registers pinned so far.  Globals
// (and anything derived from them) are unknown; unset registers read as 0,
// mirroring the engine's defaults.
struct Env {
  std::map<std::string, std::optional<Value>> regs;  // absent: never written
  std::map<std::string, std::set<int>> taint;        // register -> producing calls
};

inline std::optional<Value> static_eval(const Program& prog, const Env& env,
                                        const ExprP& e) {
  if (!e) return Value::bot();
  bool unknown = false;
  engine::ReadFn rd = [&](const std::string& n, std::optional<int>) -> Value {
    if (prog.is_global(n)) {
      unknown = true;
      return Value::integer(0);
    }
    auto it = env.regs.find(n);
    if (it == env.regs.end()) return Value::integer(0);
    if (!it->second) {
      unknown = true;
      return Value::integer(0);
    }
    return *it->second;
  };
  Value v = engine::eval_expr(e, rd);
  if (unknown) return std::nullopt;
  return v;
}

inline std::set<int> expr_taint(const Program& prog, const Env& env, const ExprP& e) {
  std::set<int> r;
  std::vector<std::string> vars;
  collect_vars(e, vars);
  for (auto& n : vars) {
    if (prog.is_global(n)) continue;
    auto it = env.taint.find(n);
    if (it != env.taint.end()) r.insert(it->second.begin(), it->second.end());
  }
  return r;
}

// Per-thread symbolic walk.  Choice points: branch outcomes, loop iteration
// counts (up to the unroll bound), operation outputs, and written values
// whose right-hand side is not statically known.
struct ThreadWalker {
  const Program& prog;
  const std::map<std::string, ObjectImpl>& impls;
  const std::map<std::string, bool>& writes_tab;
  int unroll;
  std::vector<ThreadPath> out;

  struct Frame {
    const Block* block = nullptr;
    std::size_t idx = 0;
    const Stmt* loop = nullptr;  // enclosing while, for re-evaluation
    int iter = 0;
  };

  bool call_writes(const std::string& obj, const std::string& op) const {
    auto it = writes_tab.find(obj + "." + op);
    if (it != writes_tab.end()) return it->second;
    auto oit = impls.find(obj);
    if (oit != impls.end()) return oit->second.op_always_writes(op);
    return true;
  }

  std::string counted(std::map<std::string, int>& counts, const std::string& key,
                      const std::string& base) const {
    int n = ++counts[key];
    std::string label = base;
    if (n > 1) label += "#" + std::to_string(n);
    return label;
  }

  ValueDomain out_domain() const {
    return prog.vals.empty() ? default_domain() : prog.vals;
  }

  void run(const Block& b) {
    Env env;
    std::map<std::string, int> counts;
    go({Frame{&b, 0, nullptr, 0}}, env, counts, {});
  }

  void go(std::vector<Frame> frames, Env env, std::map<std::string, int> counts,
          ThreadPath acc) {
    // find the control point (closing loop frames re-test their condition)
    const Stmt* s = nullptr;
    bool recheck = false;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.idx < f.block->stmts.size()) {
        s = f.block->stmts[f.idx].get();
        break;
      }
      if (f.loop) {
        s = f.loop;
        recheck = true;
        break;
      }
      frames.pop_back();
    }
    if (!s) {
      out.push_back(std::move(acc));
      return;
    }

    switch (s->k) {
      case Stmt::K::Assign: {
        if (!recheck) frames.back().idx++;
        if (!prog.is_global(s->lhs)) {
          env.regs[s->lhs] = static_eval(prog, env, s->e1);
          env.taint[s->lhs] = expr_taint(prog, env, s->e1);
          go(std::move(frames), std::move(env), std::move(counts), std::move(acc));
          return;
        }
        auto deps = expr_taint(prog, env, s->e1);
        auto known = static_eval(prog, env, s->e1);
        ValueDomain choices = known ? ValueDomain{*known} : out_domain();
        for (const Value& v : choices) {
          auto cts = counts;
          std::string label = counted(cts, "a:" + s->lhs, s->lhs + "=" + to_string(v));
          ThreadPath a2 = acc;
          PathEvent pe;
          pe.k = PathEvent::K::Write;
          pe.label = label;
          pe.var = s->lhs;
          pe.wval = v;
          pe.deps = deps;
          a2.push_back(std::move(pe));
          go(frames, env, std::move(cts), std::move(a2));
        }
        return;
      }

      case Stmt::K::Await: {
        if (!recheck) frames.back().idx++;
        auto known = static_eval(prog, env, s->e1);
        if (known && !known->truthy()) {
          out.push_back(std::move(acc));  // never passes: thread blocks eventless
          return;
        }
        PathEvent pe;
        pe.k = PathEvent::K::Await;
        pe.label = counted(counts, "w:" + s->cond_src("await"), s->cond_src("await"));
        const Expr& c = *s->e1;
        if (c.k == Expr::K::Binary && c.op == "=") {
          const ExprP* v = nullptr;
          const ExprP* k = nullptr;
          if (c.a->k == Expr::K::Var && c.b->k == Expr::K::Const) v = &c.a, k = &c.b;
          if (c.b->k == Expr::K::Var && c.a->k == Expr::K::Const) v = &c.b, k = &c.a;
          if (v && prog.is_global((*v)->name)) {
            pe.sync = true;
            pe.var = (*v)->name;
            pe.wval = (*k)->cval;
          }
        }
        acc.push_back(std::move(pe));
        go(std::move(frames), std::move(env), std::move(counts), std::move(acc));
        return;
      }

      case Stmt::K::Fence:
      case Stmt::K::CFence: {
        if (!recheck) frames.back().idx++;
        bool cf = s->k == Stmt::K::CFence;
        PathEvent pe;
        pe.k = cf ? PathEvent::K::CFence : PathEvent::K::Fence;
        pe.label = counted(counts, cf ? "f:cfence" : "f:fence", cf ? "cfence" : "fence");
        acc.push_back(std::move(pe));
        go(std::move(frames), std::move(env), std::move(counts), std::move(acc));
        return;
      }

      case Stmt::K::If: {
        frames.back().idx++;
        PathEvent pe;
        pe.k = PathEvent::K::Branch;
        pe.label = counted(counts, "b:" + s->cond_src("if"), s->cond_src("if"));
        acc.push_back(std::move(pe));
        auto known = static_eval(prog, env, s->e1);
        for (bool taken : {true, false}) {
          if (known && known->truthy() != taken) continue;
          auto fr = frames;
          const Block* body = taken ? (s->body ? s->body.get() : nullptr)
                                    : (s->els ? s->els.get() : nullptr);
          if (body) fr.push_back(Frame{body, 0, nullptr, 0});
          go(std::move(fr), env, counts, acc);
        }
        return;
      }

      case Stmt::K::While: {
        int iter = recheck ? frames.back().iter : 0;
        if (!recheck) frames.back().idx++;
        else frames.pop_back();
        PathEvent pe;
        pe.k = PathEvent::K::Branch;
        pe.label = counted(counts, "b:" + s->cond_src("while"), s->cond_src("while"));
        acc.push_back(std::move(pe));
        auto known = static_eval(prog, env, s->e1);
        for (bool taken : {true, false}) {
          if (known && known->truthy() != taken) continue;
          if (taken) {
            if (iter + 1 > unroll) {
              out.push_back(acc);  // iteration bound: the thread goes no further
              continue;
            }
            auto fr = frames;
            fr.push_back(Frame{s->body ? s->body.get() : nullptr, 0, s, iter + 1});
            if (!s->body) fr.back().block = &empty_block();
            go(std::move(fr), env, counts, acc);
          } else {
            go(frames, env, counts, acc);
          }
        }
        return;
      }

      case Stmt::K::Return:
        out.push_back(std::move(acc));
        return;

      case Stmt::K::Tas:
      case Stmt::K::Cas: {
        if (!recheck) frames.back().idx++;
        auto expd = static_eval(prog, env, s->e1);
        auto newv = static_eval(prog, env, s->e2);
        auto emit_case = [&](bool success, const Value& written) {
          auto cts = counts;
          Env e2 = env;
          if (!s->lhs.empty() && !prog.is_global(s->lhs)) {
            e2.regs[s->lhs] = Value::integer(success ? 1 : 0);
            e2.taint[s->lhs].clear();
          }
          ThreadPath a2 = acc;
          PathEvent pe;
          pe.k = PathEvent::K::Write;
          pe.label = counted(cts, (s->k == Stmt::K::Tas ? "t:" : "c:") + s->var,
                             s->var + "=" + to_string(written));
          pe.var = s->var;
          pe.wval = written;
          pe.drains = true;
          pe.deps = success ? expr_taint(prog, env, s->e2) : std::set<int>{};
          a2.push_back(std::move(pe));
          go(frames, std::move(e2), std::move(cts), std::move(a2));
        };
        ValueDomain dom = out_domain();
        ValueDomain news = newv ? ValueDomain{*newv} : dom;
        for (const Value& nv : news) emit_case(true, nv);
        for (const Value& cur : dom)
          if (!(expd && cur == *expd)) emit_case(false, cur);
        return;
      }

      case Stmt::K::OpCall: {
        if (!recheck) frames.back().idx++;
        auto inKnown = s->e1 ? static_eval(prog, env, s->e1)
                             : std::optional<Value>(Value::bot());
        ValueDomain ins = inKnown ? ValueDomain{*inKnown} : out_domain();
        ValueDomain outs =
            s->lhs.empty() ? ValueDomain{Value::bot()} : out_domain();
        bool w = call_writes(s->obj, s->op);
        for (const Value& in : ins) {
          for (const Value& out_v : outs) {
            auto cts = counts;
            std::string label =
                counted(cts, "o:" + s->obj + "." + s->op, s->obj + "." + s->op);
            ThreadPath a2 = acc;
            PathEvent pe;
            pe.k = PathEvent::K::OpCall;
            pe.label = label;
            pe.in = in;
            pe.out = out_v;
            pe.writes = w;
            int opPos = static_cast<int>(a2.size());
            a2.push_back(std::move(pe));
            Env e2 = env;
            if (!s->lhs.empty() && !prog.is_global(s->lhs)) {
              e2.regs[s->lhs] = out_v;
              e2.taint[s->lhs] = {opPos};
            }
            if (!s->lhs.empty() && prog.is_global(s->lhs)) {
              std::string rl =
                  counted(cts, "a:" + s->lhs, s->lhs + "=" + to_string(out_v));
              PathEvent ret;
              ret.k = PathEvent::K::Write;
              ret.label = rl;
              ret.var = s->lhs;
              ret.wval = out_v;
              ret.deps = {opPos};
              a2.push_back(std::move(ret));
            }
            go(frames, std::move(e2), std::move(cts), std::move(a2));
          }
        }
        return;
      }
    }
  }

  static const Block& empty_block() {
    static const Block b{};
    return b;
  }
};

}  // namespace order_detail

// All control-flow paths of a program.  `writes` overrides, per "obj.op",
// whether a call is treated as leaving a store behind (the default is derived
// from the implementation, or true when none is known).
inline std::vector<Path> enumerate_paths(
    const Program& prog, const std::map<std::string, ObjectImpl>& impls,
    const Bounds& bounds, const std::map<std::string, bool>& writes = {}) {
  std::vector<std::vector<ThreadPath>> per_thread;
  for (const Block& b : prog.threads) {
    order_detail::ThreadWalker w{prog, impls, writes, bounds.unroll, {}};
    w.run(b);
    per_thread.push_back(std::move(w.out));
  }
  std::vector<Path> result;
  Path cur;
  cur.threads.resize(per_thread.size());
  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (t == per_thread.size()) {
      result.push_back(cur);
      return;
    }
    for (const ThreadPath& tp : per_thread[t]) {
      cur.threads[t] = tp;
      self(self, t + 1);
    }
  };
  rec(rec, 0);
  return result;
}

inline std::vector<Path> enumerate_paths(const Scenario& sc,
                                         const std::map<std::string, bool>& writes = {}) {
  return enumerate_paths(sc.program, sc.impls, sc.bounds, writes);
}

// The events a path can produce (one response/effect variant per call, as
// pinned by the path).
inline std::vector<Event> path_events(const Path& p) {
  std::vector<Event> ev;
  for (std::size_t t = 0; t < p.threads.size(); ++t) {
    ThreadId tid = static_cast<ThreadId>(t);
    for (const PathEvent& pe : p.threads[t]) {
      if (pe.k == PathEvent::K::OpCall) {
        ev.push_back(inv_ev(tid, pe.label, pe.in));
        ev.push_back(res_ev(tid, pe.label, pe.out));
        ev.push_back(effop_ev(tid, pe.label, pe.out));
      } else {
        ev.push_back(step_ev(tid, pe.label));
        ev.push_back(eff_ev(tid, pe.label));
      }
    }
  }
  return ev;
}

// The event set of a path closed under the rule that a called operation may
// respond and take effect with any output of the domain.
inline std::vector<Event> event_universe(const Program& prog, const Path& p) {
  std::vector<Event> ev = path_events(p);
  std::set<Event> have(ev.begin(), ev.end());
  ValueDomain dom = prog.vals.empty() ? default_domain() : prog.vals;
  for (std::size_t t = 0; t < p.threads.size(); ++t) {
    ThreadId tid = static_cast<ThreadId>(t);
    for (const PathEvent& pe : p.threads[t]) {
      if (pe.k != PathEvent::K::OpCall) continue;
      for (const Value& out : dom) {
        for (Event e : {res_ev(tid, pe.label, out), effop_ev(tid, pe.label, out)})
          if (have.insert(e).second) ev.push_back(e);
      }
    }
  }
  return ev;
}

// Does the path account for every event of the trace?
inline bool path_covers(const Path& p, const Trace& t) {
  auto ev = path_events(p);
  std::set<Event> have(ev.begin(), ev.end());
  for (const Event& e : t.ev)
    if (!have.count(e)) return false;
  return true;
}

// --- enforced order construction ---------------------------------------------
//
// Shared by all models: program steps, invocations and responses keep their
// program-text order per thread; every effect follows its step, every
// operation effect its invocation; a write whose value derives from an
// operation's result cannot take effect before the operation does; an await
// with a unique writer on another thread synchronises on that write's effect.
//
// SC adds immediacy: each effect precedes the next program-order event, and
// operation effects precede their responses.  TSO orders the effects of
// buffered stores (global writes and the effects of store-performing calls)
// in issue order -- except that a program effect is never enforced ahead of an
// operation effect, which would break the axiom tying operation effects to
// invocations -- and drains the buffer at fences and atomics.  The relaxed
// model keeps only per-variable coherence of writes plus drains at fences,
// atomics and awaits.
inline PartialOrder partial_order(const Program& prog, Model model, const Path& path) {
  PartialOrder po;
  for (const Event& e : path_events(path)) po.add_event(e);

  struct Mat {
    Event head, tail;     // issue chain ends (step..step, inv..res)
    Event eff;            // prog eff or effop
    const PathEvent* pe;
  };

  for (std::size_t t = 0; t < path.threads.size(); ++t) {
    ThreadId tid = static_cast<ThreadId>(t);
    const ThreadPath& tp = path.threads[t];
    std::vector<Mat> ms;
    for (const PathEvent& pe : tp) {
      Mat m;
      m.pe = &pe;
      if (pe.k == PathEvent::K::OpCall) {
        Event I = inv_ev(tid, pe.label, pe.in);
        Event R = res_ev(tid, pe.label, pe.out);
        Event F = effop_ev(tid, pe.label, pe.out);
        m.head = I;
        m.tail = R;
        m.eff = F;
        po.add(I, R);
        po.add(I, F);
        if (model == Model::SC) po.add(F, R);
      } else {
        Event S = step_ev(tid, pe.label);
        Event E = eff_ev(tid, pe.label);
        m.head = S;
        m.tail = S;
        m.eff = E;
        po.add(S, E);
      }
      ms.push_back(std::move(m));
    }

    for (std::size_t i = 0; i + 1 < ms.size(); ++i) {
      po.add(ms[i].tail, ms[i + 1].head);
      bool immediate = model == Model::SC ||
                       (ms[i].pe->k == PathEvent::K::Write && ms[i].pe->drains);
      if (immediate && ms[i].pe->k != PathEvent::K::OpCall)
        po.add(ms[i].eff, ms[i + 1].head);
    }

    // value dependencies on operation results (all models)
    for (const Mat& m : ms)
      if (m.pe->k == PathEvent::K::Write)
        for (int d : m.pe->deps)
          po.add(ms[static_cast<std::size_t>(d)].eff, m.eff);

    if (model == Model::TSO) {
      // FIFO flushing of buffered stores
      std::vector<const Mat*> fifo;
      for (const Mat& m : ms) {
        bool buffered = (m.pe->k == PathEvent::K::Write) ||
                        (m.pe->k == PathEvent::K::OpCall && m.pe->writes);
        if (buffered) fifo.push_back(&m);
      }
      for (std::size_t i = 0; i < fifo.size(); ++i)
        for (std::size_t j = i + 1; j < fifo.size(); ++j) {
          bool prog_to_op = fifo[i]->pe->k == PathEvent::K::Write &&
                            fifo[j]->pe->k == PathEvent::K::OpCall;
          if (!prog_to_op) po.add(fifo[i]->eff, fifo[j]->eff);
        }
    }

    if (model == Model::RELAXED) {
      // per-variable write coherence
      for (std::size_t i = 0; i < ms.size(); ++i)
        for (std::size_t j = i + 1; j < ms.size(); ++j)
          if (ms[i].pe->k == PathEvent::K::Write &&
              ms[j].pe->k == PathEvent::K::Write && ms[i].pe->var == ms[j].pe->var)
            po.add(ms[i].eff, ms[j].eff);
    }

    if (model == Model::TSO || model == Model::RELAXED) {
      // drain points: fences and atomics empty the buffer/pool before they
      // issue; a relaxed await issues only on an empty pool
      for (std::size_t j = 0; j < ms.size(); ++j) {
        const PathEvent& pe = *ms[j].pe;
        bool drain = pe.k == PathEvent::K::Fence ||
                     (pe.k == PathEvent::K::Write && pe.drains) ||
                     (model == Model::RELAXED && pe.k == PathEvent::K::Await);
        if (!drain) continue;
        for (std::size_t i = 0; i < j; ++i) {
          const PathEvent& q = *ms[i].pe;
          bool buffered = (q.k == PathEvent::K::Write) ||
                          (q.k == PathEvent::K::OpCall && q.writes);
          if (buffered) po.add(ms[i].eff, ms[j].head);
        }
      }
    }
  }

  // program synchronisation: an await(g=c) whose value is supplied by exactly
  // one write in the whole program, on a different thread, cannot pass before
  // that write takes effect
  for (std::size_t t = 0; t < path.threads.size(); ++t) {
    for (const PathEvent& pe : path.threads[t]) {
      if (pe.k != PathEvent::K::Await || !pe.sync) continue;
      if (prog.global_init(pe.var) == pe.wval) continue;
      const PathEvent* writer = nullptr;
      std::size_t wt = 0;
      int count = 0;
      for (std::size_t u = 0; u < path.threads.size(); ++u)
        for (const PathEvent& w : path.threads[u])
          if (w.k == PathEvent::K::Write && w.var == pe.var && w.wval == pe.wval) {
            ++count;
            writer = &w;
            wt = u;
          }
      if (count == 1 && wt != t)
        po.add(eff_ev(static_cast<ThreadId>(wt), writer->label),
               step_ev(static_cast<ThreadId>(t), pe.label));
    }
  }

  po.close();
  return po;
}

}  // namespace wmm
