#pragma once

// Issue-action half of the explorer (included by explore.hpp).

namespace wmm {
namespace engine {

inline const Stmt* peek_current(const Cursor& cur, bool& recheck) {
  Cursor copy = cur;
  return cursor_current(copy, recheck);
}

inline int Explorer::issue_variants(const State& st, int t) const {
  const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
  if (th.stuck) return 0;
  if (th.ret_assign) return 1;
  if (th.active_op >= 0) return op_issue_variants(st, t);

  bool recheck = false;
  const Stmt* s = peek_current(th.cur, recheck);
  if (!s) return 0;

  auto drained = [&] {
    if (ctx.model == Model::TSO) return th.buffer.empty();
    if (ctx.model == Model::RELAXED) return th.pool.empty();
    return true;
  };

  switch (s->k) {
    case Stmt::K::Assign:
    case Stmt::K::If:
    case Stmt::K::While:
    case Stmt::K::CFence:
    case Stmt::K::Return:
      return 1;
    case Stmt::K::Fence:
      return drained() ? 1 : 0;
    case Stmt::K::Await: {
      // awaits block; under TSO they read through the buffer, elsewhere the
      // implicit fence has drained pending accesses first
      if (ctx.model == Model::RELAXED && !th.pool.empty()) return 0;
      Value c = eval_expr(s->e1, client_reader(st, t));
      return c.truthy() ? 1 : 0;
    }
    case Stmt::K::Tas:
    case Stmt::K::Cas:
      return drained() ? 1 : 0;  // program-level TAS/CAS on globals
    case Stmt::K::OpCall: {
      if (!ctx.spec_mode) return 1;
      // atomic specification: invoked only once the thread's own pending
      // writes have hit memory, and only when the spec has a transition
      if (!drained()) return 0;
      const ObjectSpec* sp = ctx.specs.at(s->obj);
      Value in = s->e1 ? eval_expr(s->e1, client_reader(st, t)) : Value::bot();
      return static_cast<int>(sp->step(s->op, st.specmem.at(s->obj), in).size());
    }
  }
  return 0;
}

inline std::set<int> Explorer::expr_deps(const ThreadState& th, const ExprP& e) const {
  std::set<int> deps;
  if (!e) return deps;
  std::vector<std::string> vars;
  collect_vars(e, vars);
  for (auto& n : vars) {
    auto it = th.reg_deps.find(n);
    if (it != th.reg_deps.end()) deps.insert(it->second.begin(), it->second.end());
  }
  return deps;
}

inline bool Explorer::client_assign(State& st, int t, const std::string& lhs, Value v,
                                    const std::set<int>& deps) {
  ThreadState& th = st.threads[static_cast<std::size_t>(t)];
  if (!ctx.prog->is_global(lhs)) {  // registers are thread-local and silent
    th.regs[lhs] = v;
    th.reg_deps[lhs] = deps;
    return true;
  }
  int n = ++th.label_count["a:" + lhs];
  std::string label = with_count(lhs + "=" + to_string(v), n);
  if (!emit(st, step_ev(t, label))) return false;
  switch (ctx.model) {
    case Model::SC:
      st.globals[lhs] = v;
      return emit(st, eff_ev(t, label));
    case Model::TSO: {
      BufWrite w;
      w.is_obj = false;
      w.var = lhs;
      w.val = v;
      w.eff_label = label;
      th.buffer.push_back(std::move(w));
      return true;
    }
    case Model::RELAXED: {
      Pending p;
      p.k = Pending::K::ClientWrite;
      p.var = lhs;
      p.val = v;
      p.eff_label = label;
      p.dep_ops = deps;
      th.pool.push_back(std::move(p));
      return true;
    }
  }
  return true;
}

inline bool Explorer::issue(State& st, int t, int variant) {
  ThreadState& th = st.threads[static_cast<std::size_t>(t)];

  if (th.ret_assign) {
    auto ra = *th.ret_assign;
    th.ret_assign.reset();
    std::set<int> deps;
    if (ra.op_idx >= 0) deps.insert(ra.op_idx);
    return client_assign(st, t, ra.lhs, ra.val, deps);
  }
  if (th.active_op >= 0) return op_issue(st, t, variant);

  bool recheck = false;
  const Stmt* s = cursor_current(th.cur, recheck);
  if (!s) return false;

  switch (s->k) {
    case Stmt::K::Assign: {
      Value v = eval_expr(s->e1, client_reader(st, t));
      cursor_advance(th.cur);
      return client_assign(st, t, s->lhs, v, expr_deps(th, s->e1));
    }
    case Stmt::K::Await: {
      std::string label = fresh_label(th, *s, s->cond_src("await"));
      cursor_advance(th.cur);
      return emit(st, step_ev(t, label)) && emit(st, eff_ev(t, label));
    }
    case Stmt::K::Fence:
    case Stmt::K::CFence: {
      std::string base = s->k == Stmt::K::Fence ? "fence" : "cfence";
      std::string label = fresh_label(th, *s, base);
      cursor_advance(th.cur);
      return emit(st, step_ev(t, label)) && emit(st, eff_ev(t, label));
    }
    case Stmt::K::If: {
      bool taken = eval_expr(s->e1, client_reader(st, t)).truthy();
      std::string label = fresh_label(th, *s, s->cond_src("if"));
      if (!emit(st, step_ev(t, label)) || !emit(st, eff_ev(t, label))) return false;
      cursor_enter_if(th.cur, s, taken);
      return true;
    }
    case Stmt::K::While: {
      bool taken = eval_expr(s->e1, client_reader(st, t)).truthy();
      std::string label = fresh_label(th, *s, s->cond_src("while"));
      if (!emit(st, step_ev(t, label)) || !emit(st, eff_ev(t, label))) return false;
      if (taken) {
        int iter = cursor_enter_while(th.cur, s, recheck);
        if (iter > ctx.bounds.unroll) {
          th.stuck = true;
          truncated = true;
        }
      } else {
        if (recheck) th.cur.pop_back();
        else cursor_advance(th.cur);
      }
      return true;
    }
    case Stmt::K::Return:
      th.cur.clear();
      return true;
    case Stmt::K::Tas:
    case Stmt::K::Cas: {
      // program-level atomic on a global (buffer/pool already drained)
      Value cur = read_global(st, t, s->var);
      Value expd = eval_expr(s->e1, client_reader(st, t));
      Value newv = eval_expr(s->e2, client_reader(st, t));
      Value res = Value::integer(0);
      std::string label;
      if (cur == expd) {
        st.globals[s->var] = newv;
        res = Value::integer(1);
      }
      cursor_advance(th.cur);
      if (!s->lhs.empty() && !ctx.prog->is_global(s->lhs)) {
        th.regs[s->lhs] = res;
        th.reg_deps[s->lhs].clear();
      }
      label = fresh_label(th, *s, s->var + "=" + to_string(cur == expd ? newv : cur));
      return emit(st, step_ev(t, label)) && emit(st, eff_ev(t, label));
    }
    case Stmt::K::OpCall: {
      Value in = s->e1 ? eval_expr(s->e1, client_reader(st, t)) : Value::bot();
      std::string label = fresh_label(th, *s, s->obj + "." + s->op);
      cursor_advance(th.cur);
      if (ctx.spec_mode) {
        const ObjectSpec* sp = ctx.specs.at(s->obj);
        auto succs = sp->step(s->op, st.specmem.at(s->obj), in);
        auto& [s2, out] = succs[static_cast<std::size_t>(variant)];
        st.specmem[s->obj] = s2;
        if (!emit(st, inv_ev(t, label, in))) return false;
        if (!emit(st, effop_ev(t, label, out))) return false;
        if (!emit(st, res_ev(t, label, out))) return false;
        if (!s->lhs.empty()) {
          if (ctx.prog->is_global(s->lhs)) {
            th.ret_assign = ThreadState::RetAssign{s->lhs, out, -1};
          } else {
            th.regs[s->lhs] = out;
            th.reg_deps[s->lhs].clear();  // spec effects are immediate
          }
        }
        return true;
      }
      // implementation mode: enter the operation body
      const ObjectImpl* impl = ctx.impls.at(s->obj);
      const OpDef& def = impl->ops.at(s->op);
      OpRecord rec;
      rec.label = label;
      rec.obj = s->obj;
      rec.opName = s->op;
      rec.input = in;
      if (!def.param.empty()) rec.regs[def.param] = in;
      rec.ret_to = s->lhs;
      th.ops.push_back(std::move(rec));
      th.active_op = static_cast<int>(th.ops.size()) - 1;
      th.op_cur.clear();
      if (def.body && !def.body->stmts.empty())
        th.op_cur.push_back({def.body.get(), 0, nullptr, 0});
      return emit(st, inv_ev(t, label, in));
    }
  }
  return false;
}

// --- operation-body issue ----------------------------------------------------

inline int Explorer::op_issue_variants(const State& st, int t) const {
  const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
  const OpRecord& rec = th.ops[static_cast<std::size_t>(th.active_op)];
  const ObjectImpl* impl = ctx.impls.at(rec.obj);

  bool recheck = false;
  const Stmt* s = peek_current(th.op_cur, recheck);

  auto drained = [&] {
    if (ctx.model == Model::TSO) return th.buffer.empty();
    if (ctx.model == Model::RELAXED) return th.pool.empty();
    return true;
  };
  auto ret_ready = [&](const ExprP& e) {
    if (ctx.model != Model::RELAXED) return true;
    if (pool_has_branch(th)) return false;
    if (!e) return true;
    std::vector<std::string> vars;
    collect_vars(e, vars);
    for (auto& n : vars) {
      if (is_objvar(impl, n)) return false;  // returns read registers only
      if (!reg_resolved(th, n, st, t)) return false;
    }
    return true;
  };

  if (!s) return ret_ready(nullptr) ? 1 : 0;  // implicit return

  switch (s->k) {
    case Stmt::K::Assign:
      if (ctx.model == Model::RELAXED &&
          static_cast<int>(th.pool.size()) >= ctx.bounds.window)
        return 0;
      return 1;
    case Stmt::K::Tas:
    case Stmt::K::Cas:
    case Stmt::K::Fence:
      return drained() ? 1 : 0;
    case Stmt::K::CFence:
      if (ctx.model == Model::RELAXED)
        return static_cast<int>(th.pool.size()) < ctx.bounds.window ? 1 : 0;
      return 1;
    case Stmt::K::Await: {
      if (!drained()) return 0;
      ReadFn rd = ctx.model == Model::RELAXED ? commit_reader(st, rec.obj, impl, rec)
                                              : op_reader(st, t, rec.obj, impl, rec);
      return eval_expr(s->e1, rd).truthy() ? 1 : 0;
    }
    case Stmt::K::If:
    case Stmt::K::While: {
      if (ctx.model != Model::RELAXED) return 1;
      if (!pool_has_branch(th) && regs_resolved(th, s->e1, st, t, impl))
        return 1;  // resolved: evaluate directly
      if (static_cast<int>(th.pool.size()) >= ctx.bounds.window) return 0;
      return 2;  // speculative guess
    }
    case Stmt::K::Return:
      return ret_ready(s->e1) ? 1 : 0;
    case Stmt::K::OpCall:
      return 0;  // rejected by the parser
  }
  return 0;
}

inline bool Explorer::op_issue(State& st, int t, int variant) {
  ThreadState& th = st.threads[static_cast<std::size_t>(t)];
  int opIdx = th.active_op;
  OpRecord& rec = th.ops[static_cast<std::size_t>(opIdx)];
  const ObjectImpl* impl = ctx.impls.at(rec.obj);

  bool recheck = false;
  const Stmt* s = cursor_current(th.op_cur, recheck);

  auto do_return = [&](const ExprP& e) -> bool {
    ReadFn rd = ctx.model == Model::RELAXED ? commit_reader(st, rec.obj, impl, rec)
                                            : op_reader(st, t, rec.obj, impl, rec);
    rec.output = e ? eval_expr(e, rd) : Value::bot();
    rec.res_emitted = true;
    th.active_op = -1;
    th.op_cur.clear();
    if (ctx.model == Model::SC) {
      // effects are immediate: the operation takes effect before it returns
      if (!emit_effop_if_due(st, t, opIdx)) return false;
      if (!emit(st, res_ev(t, rec.label, rec.output))) return false;
    } else {
      if (!emit(st, res_ev(t, rec.label, rec.output))) return false;
      emit_effop_if_due(st, t, opIdx);
    }
    if (!rec.ret_to.empty()) {
      if (ctx.prog->is_global(rec.ret_to)) {
        th.ret_assign = ThreadState::RetAssign{rec.ret_to, rec.output, opIdx};
      } else {
        th.regs[rec.ret_to] = rec.output;
        th.reg_deps[rec.ret_to] = {opIdx};
      }
    }
    return true;
  };

  if (!s) return do_return(nullptr);

  switch (s->k) {
    case Stmt::K::Return:
      return do_return(s->e1);
    case Stmt::K::Assign: {
      cursor_advance(th.op_cur);
      if (ctx.model == Model::RELAXED) {
        if (is_objvar(impl, s->lhs)) rec.pending++;
        Pending p;
        p.k = Pending::K::ObjAssign;
        p.stmt = s;
        p.op_idx = opIdx;
        th.pool.push_back(std::move(p));
        return true;
      }
      ReadFn rd = op_reader(st, t, rec.obj, impl, rec);
      Value v = eval_expr(s->e1, rd);
      if (is_objvar(impl, s->lhs)) {
        std::optional<int> idx;
        if (s->lhs_index) {
          Value iv = eval_expr(s->lhs_index, rd);
          idx = iv.is_int() ? iv.num : 0;
        }
        if (ctx.model == Model::TSO) {
          BufWrite w;
          w.is_obj = true;
          w.obj = rec.obj;
          w.var = s->lhs;
          w.idx = idx ? *idx : -1;
          w.val = v;
          w.op_idx = opIdx;
          th.buffer.push_back(std::move(w));
          rec.pending++;
        } else {  // SC
          write_objvar_mem(st, rec.obj, impl, s->lhs, idx, v);
        }
      } else {
        rec.regs[s->lhs] = v;
      }
      return true;
    }
    case Stmt::K::Tas:
    case Stmt::K::Cas: {
      // buffer/pool drained: operate on memory directly; the built-in fence
      // makes the write immediately visible
      cursor_advance(th.op_cur);
      ReadFn rd = ctx.model == Model::RELAXED ? commit_reader(st, rec.obj, impl, rec)
                                              : op_reader(st, t, rec.obj, impl, rec);
      Value cur = read_objvar_mem(st, rec.obj, s->var, std::nullopt);
      Value expd = eval_expr(s->e1, rd);
      Value newv = eval_expr(s->e2, rd);
      Value out = Value::integer(0);
      if (cur == expd) {
        write_objvar_mem(st, rec.obj, impl, s->var, std::nullopt, newv);
        out = Value::integer(1);
      }
      if (!s->lhs.empty()) rec.regs[s->lhs] = out;
      return true;
    }
    case Stmt::K::Await:
      cursor_advance(th.op_cur);
      return true;  // guard held at issue (checked in op_issue_variants)
    case Stmt::K::Fence:
      cursor_advance(th.op_cur);
      return true;  // waits for a drained buffer/pool
    case Stmt::K::CFence:
      cursor_advance(th.op_cur);
      if (ctx.model == Model::RELAXED) {
        Pending p;
        p.k = Pending::K::CfenceMark;
        p.op_idx = opIdx;
        th.pool.push_back(std::move(p));
      }
      return true;
    case Stmt::K::If: {
      if (ctx.model == Model::RELAXED &&
          !(!pool_has_branch(th) && regs_resolved(th, s->e1, st, t, impl))) {
        bool guess = variant != 0;
        Pending p;
        p.k = Pending::K::Branch;
        p.stmt = s;
        p.op_idx = opIdx;
        p.guess = guess ? 1 : 0;
        th.pool.push_back(std::move(p));
        cursor_enter_if(th.op_cur, s, guess);
        return true;
      }
      ReadFn rd = ctx.model == Model::RELAXED ? commit_reader(st, rec.obj, impl, rec)
                                              : op_reader(st, t, rec.obj, impl, rec);
      cursor_enter_if(th.op_cur, s, eval_expr(s->e1, rd).truthy());
      return true;
    }
    case Stmt::K::While: {
      bool speculated = ctx.model == Model::RELAXED &&
                        !(!pool_has_branch(th) && regs_resolved(th, s->e1, st, t, impl));
      bool taken;
      if (speculated) {
        taken = variant != 0;
        Pending p;
        p.k = Pending::K::Branch;
        p.stmt = s;
        p.op_idx = opIdx;
        p.guess = taken ? 1 : 0;
        th.pool.push_back(std::move(p));
      } else {
        ReadFn rd = ctx.model == Model::RELAXED ? commit_reader(st, rec.obj, impl, rec)
                                                : op_reader(st, t, rec.obj, impl, rec);
        taken = eval_expr(s->e1, rd).truthy();
      }
      if (taken) {
        int iter = cursor_enter_while(th.op_cur, s, recheck);
        if (iter > ctx.bounds.unroll) {
          th.stuck = true;
          truncated = true;
        }
      } else {
        if (recheck) th.op_cur.pop_back();
        else cursor_advance(th.op_cur);
      }
      return true;
    }
    case Stmt::K::OpCall:
      return false;
  }
  return false;
}

}  // namespace engine
}  // namespace wmm
