#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wmm/objects.hpp"
#include "wmm/program.hpp"
#include "wmm/trace.hpp"

namespace wmm {

// ---------------------------------------------------------------------------
// Machine state
//
// SC: statements execute and take effect at issue.
// TSO: writes (program and object) enter a per-thread FIFO store buffer and
//      take effect when flushed; reads forward from the own buffer; fences
//      and TAS/CAS wait for an empty buffer.
// RELAXED: program writes and object-internal instructions enter a per-thread
//      commit pool and take effect out of order, subject to same-variable,
//      register and control dependencies; control fences keep loads behind
//      earlier branches; full fences drain the pool; branches behind
//      unresolved state are issued speculatively against a guess and the
//      execution is discarded if the guess is refuted.

namespace engine {

struct ObjMem {
  std::map<std::string, Value> scalars;
  std::map<std::string, std::vector<Value>> arrays;

  bool operator==(const ObjMem&) const = default;
  auto operator<=>(const ObjMem&) const = default;
};

struct Frame {
  const Block* block = nullptr;
  std::size_t idx = 0;
  const Stmt* loop = nullptr;  // enclosing while, when this is its body
  int iter = 0;

  bool operator==(const Frame&) const = default;
  auto operator<=>(const Frame&) const = default;
};

using Cursor = std::vector<Frame>;

struct OpRecord {
  std::string label;  // e.g. "sl.acquire" or "d.put#2"
  std::string obj, opName;
  Value input = Value::bot();
  Value output = Value::bot();
  std::map<std::string, Value> regs;
  std::string ret_to;  // program variable receiving the result, may be empty
  int pending = 0;     // outstanding shared writes
  bool res_emitted = false;
  bool eff_emitted = false;

  bool operator==(const OpRecord&) const = default;
  auto operator<=>(const OpRecord&) const = default;
};

struct BufWrite {  // TSO store-buffer entry
  bool is_obj = false;
  std::string obj, var;
  int idx = -1;  // array slot, -1 scalar
  Value val;
  int op_idx = -1;         // owning operation record, -1 for program writes
  std::string eff_label;   // program writes: label of the eff event

  bool operator==(const BufWrite&) const = default;
  auto operator<=>(const BufWrite&) const = default;
};

struct Pending {  // RELAXED commit-pool entry
  enum class K { ClientWrite, ObjAssign, Branch, CfenceMark };
  K k = K::ClientWrite;
  const Stmt* stmt = nullptr;  // ObjAssign / Branch
  int op_idx = -1;
  std::string var;  // ClientWrite target
  Value val;        // ClientWrite value
  std::string eff_label;
  int guess = 0;               // Branch: guessed truth value
  std::set<int> dep_ops;       // ClientWrite: ops whose results the value uses

  bool operator==(const Pending&) const = default;
  auto operator<=>(const Pending&) const = default;
};

struct ThreadState {
  Cursor cur;                       // client control point
  std::map<std::string, Value> regs;
  std::map<std::string, std::set<int>> reg_deps;  // register -> producing ops
  std::map<std::string, int> label_count;  // per label-key instance numbers
  std::vector<OpRecord> ops;
  int active_op = -1;               // index into ops while inside a body
  Cursor op_cur;                    // control point inside the active body
  std::deque<BufWrite> buffer;      // TSO
  std::vector<Pending> pool;        // RELAXED
  struct RetAssign {
    std::string lhs;
    Value val;
    int op_idx = -1;
    bool operator==(const RetAssign&) const = default;
    auto operator<=>(const RetAssign&) const = default;
  };
  std::optional<RetAssign> ret_assign;  // pending "g = out" step
  bool stuck = false;               // loop bound exhausted

  bool operator==(const ThreadState&) const = default;
  auto operator<=>(const ThreadState&) const = default;
};

struct State {
  std::map<std::string, Value> globals;
  std::map<std::string, ObjMem> objmem;      // implementation mode
  std::map<std::string, SpecState> specmem;  // specification mode
  std::vector<ThreadState> threads;
  Trace trace;

  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;
};

struct Ctx {
  Model model = Model::SC;
  bool spec_mode = false;
  const Program* prog = nullptr;
  std::map<std::string, const ObjectImpl*> impls;
  std::map<std::string, const ObjectSpec*> specs;
  Bounds bounds;
};

// --- expression evaluation ---------------------------------------------------

inline Value apply_unary(const std::string& op, const Value& a) {
  if (op == "!") return Value::integer(a.truthy() ? 0 : 1);
  if (op == "-" && a.is_int()) return Value::integer(-a.num);
  return Value::bot();
}

inline Value apply_binary(const std::string& op, const Value& a, const Value& b) {
  if (op == "=") return Value::integer(a == b ? 1 : 0);
  if (op == "!=") return Value::integer(a != b ? 1 : 0);
  if (op == "&&") return Value::integer(a.truthy() && b.truthy() ? 1 : 0);
  if (op == "||") return Value::integer(a.truthy() || b.truthy() ? 1 : 0);
  if (!a.is_int() || !b.is_int()) return Value::bot();
  int x = a.num, y = b.num;
  if (op == "<") return Value::integer(x < y ? 1 : 0);
  if (op == "<=") return Value::integer(x <= y ? 1 : 0);
  if (op == ">") return Value::integer(x > y ? 1 : 0);
  if (op == ">=") return Value::integer(x >= y ? 1 : 0);
  if (op == "+") return Value::integer(x + y);
  if (op == "-") return Value::integer(x - y);
  if (op == "*") return Value::integer(x * y);
  if (op == "mod") return Value::integer(y == 0 ? 0 : ((x % y) + y) % y);
  return Value::bot();
}

// Variable resolution callback: name + optional array index -> value.
using ReadFn = std::function<Value(const std::string&, std::optional<int>)>;

inline Value eval_expr(const ExprP& e, const ReadFn& read) {
  switch (e->k) {
    case Expr::K::Const: return e->cval;
    case Expr::K::Var: return read(e->name, std::nullopt);
    case Expr::K::Index: {
      Value i = eval_expr(e->a, read);
      return read(e->name, i.is_int() ? std::optional<int>(i.num) : std::optional<int>(-1));
    }
    case Expr::K::Unary: return apply_unary(e->op, eval_expr(e->a, read));
    case Expr::K::Binary:
      return apply_binary(e->op, eval_expr(e->a, read), eval_expr(e->b, read));
  }
  return Value::bot();
}

// --- cursor helpers ------------------------------------------------------------

// The statement at the control point, handling block ends and loop re-checks.
// Returns nullptr when the cursor is exhausted.  `loop_recheck` is set when
// the returned statement is a while whose body just finished.
inline const Stmt* cursor_current(Cursor& cur, bool& loop_recheck) {
  loop_recheck = false;
  while (!cur.empty()) {
    Frame& f = cur.back();
    if (f.idx < f.block->stmts.size()) return f.block->stmts[f.idx].get();
    if (f.loop) {
      loop_recheck = true;
      return f.loop;
    }
    cur.pop_back();
  }
  return nullptr;
}

inline void cursor_advance(Cursor& cur) {  // past the current simple statement
  cur.back().idx++;
}

inline void cursor_enter_if(Cursor& cur, const Stmt* s, bool then_arm) {
  cur.back().idx++;
  const BlockP& b = then_arm ? s->body : s->els;
  if (b && !b->stmts.empty()) cur.push_back({b.get(), 0, nullptr, 0});
}

// Entering/continuing a while; returns the new iteration count.
inline int cursor_enter_while(Cursor& cur, const Stmt* s, bool recheck) {
  if (recheck) {
    Frame& f = cur.back();
    f.idx = 0;
    return ++f.iter;
  }
  cur.back().idx++;
  cur.push_back({s->body.get(), 0, s, 1});
  return 1;
}

inline void cursor_exit_while(Cursor& cur, bool recheck) {
  if (recheck) cur.pop_back();
  // not recheck: cursor_enter_while was never called; just step past
}

// --- the engine ----------------------------------------------------------------

// What a client of the explorer observes of each trace.  Full keeps whole
// traces; Obs keeps the eff-subsequence, InvRes the inv/res-subsequence.
// Projected modes fold states whose projected prefixes coincide, which keeps
// scenarios tractable whose full trace set is astronomically large.
enum class Projection { Full, Obs, InvRes };

struct Explorer {
  Ctx ctx;
  Projection proj = Projection::Full;
  std::set<Trace> maximal;  // projected when proj != Full
  std::set<State> seen;  // silent-action interleavings converge; prune revisits
  bool truncated = false;
  long long steps = 0;
  long long step_budget = 200'000'000;

  Trace project(const Trace& t) const {
    switch (proj) {
      case Projection::Full: return t;
      case Projection::InvRes: return restrict_ir(t);
      case Projection::Obs: {
        Trace r;
        r.ev = obs(t);
        return r;
      }
    }
    return t;
  }

  // label-instance bookkeeping ------------------------------------------------
  static std::string label_key(const Stmt& s) {
    switch (s.k) {
      case Stmt::K::Assign: return "a:" + s.lhs;
      case Stmt::K::OpCall: return "o:" + s.obj + "." + s.op;
      case Stmt::K::Await: return "w:" + s.cond_src("await");
      case Stmt::K::Fence: return "f:fence";
      case Stmt::K::CFence: return "f:cfence";
      case Stmt::K::If: return "b:" + s.cond_src("if");
      case Stmt::K::While: return "b:" + s.cond_src("while");
      case Stmt::K::Tas: return "t:" + s.var;
      case Stmt::K::Cas: return "c:" + s.var;
      default: return "x";
    }
  }

  static std::string with_count(std::string base, int n) {
    if (n > 1) base += "#" + std::to_string(n);
    return base;
  }

  std::string fresh_label(ThreadState& th, const Stmt& s, const std::string& base) {
    int n = ++th.label_count[label_key(s)];
    return with_count(base, n);
  }

  // value reads ---------------------------------------------------------------

  Value read_global(const State& st, int t, const std::string& name) const {
    const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
    if (ctx.model == Model::TSO) {
      for (auto it = th.buffer.rbegin(); it != th.buffer.rend(); ++it)
        if (!it->is_obj && it->var == name) return it->val;
    } else if (ctx.model == Model::RELAXED) {
      for (auto it = th.pool.rbegin(); it != th.pool.rend(); ++it)
        if (it->k == Pending::K::ClientWrite && it->var == name) return it->val;
    }
    auto it = st.globals.find(name);
    return it == st.globals.end() ? Value::integer(0) : it->second;
  }

  Value read_objvar_mem(const State& st, const std::string& obj, const std::string& var,
                        std::optional<int> idx) const {
    auto oit = st.objmem.find(obj);
    if (oit == st.objmem.end()) return Value::integer(0);
    if (idx) {
      auto ait = oit->second.arrays.find(var);
      if (ait == oit->second.arrays.end()) return Value::integer(0);
      int n = static_cast<int>(ait->second.size());
      if (n == 0) return Value::integer(0);
      int i = ((*idx % n) + n) % n;
      return ait->second[static_cast<std::size_t>(i)];
    }
    auto sit = oit->second.scalars.find(var);
    return sit == oit->second.scalars.end() ? Value::integer(0) : sit->second;
  }

  // object variable read at issue time (SC/TSO; TSO forwards from the buffer)
  Value read_objvar(const State& st, int t, const std::string& obj,
                    const std::string& var, std::optional<int> idx) const {
    if (ctx.model == Model::TSO) {
      const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
      for (auto it = th.buffer.rbegin(); it != th.buffer.rend(); ++it)
        if (it->is_obj && it->obj == obj && it->var == var &&
            it->idx == (idx ? *idx : -1))
          return it->val;
    }
    return read_objvar_mem(st, obj, var, idx);
  }

  void write_objvar_mem(State& st, const std::string& obj, const ObjectImpl* impl,
                        const std::string& var, std::optional<int> idx, Value v) const {
    ObjMem& m = st.objmem[obj];
    if (idx) {
      auto& arr = m.arrays[var];
      if (arr.empty() && impl) {
        for (auto& d : impl->vars)
          if (d.name == var && d.size > 0) arr.assign(static_cast<std::size_t>(d.size), d.init);
      }
      if (arr.empty()) arr.assign(4, Value::integer(0));
      int n = static_cast<int>(arr.size());
      int i = ((*idx % n) + n) % n;
      arr[static_cast<std::size_t>(i)] = v;
    } else {
      m.scalars[var] = v;
    }
  }

  // reader for client code (program globals and thread registers)
  ReadFn client_reader(const State& st, int t) const {
    return [this, &st, t](const std::string& name, std::optional<int>) {
      const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
      if (ctx.prog->is_global(name)) return read_global(st, t, name);
      auto it = th.regs.find(name);
      return it == th.regs.end() ? Value::integer(0) : it->second;
    };
  }

  bool is_objvar(const ObjectImpl* impl, const std::string& n) const {
    if (!impl) return false;
    for (auto& v : impl->vars)
      if (v.name == n) return true;
    return false;
  }

  // reader for object code at issue time (SC/TSO)
  ReadFn op_reader(const State& st, int t, const std::string& obj,
                   const ObjectImpl* impl, const OpRecord& rec) const {
    return [this, &st, t, obj, impl, &rec](const std::string& name,
                                           std::optional<int> idx) {
      if (is_objvar(impl, name)) return read_objvar(st, t, obj, name, idx);
      auto it = rec.regs.find(name);
      return it == rec.regs.end() ? Value::integer(0) : it->second;
    };
  }

  // reader for object code at commit time (RELAXED: memory, committed regs)
  ReadFn commit_reader(const State& st, const std::string& obj, const ObjectImpl* impl,
                       const OpRecord& rec) const {
    return [this, &st, obj, impl, &rec](const std::string& name,
                                        std::optional<int> idx) {
      if (is_objvar(impl, name)) return read_objvar_mem(st, obj, name, idx);
      auto it = rec.regs.find(name);
      return it == rec.regs.end() ? Value::integer(0) : it->second;
    };
  }

  // --- event emission ---------------------------------------------------------

  bool emit(State& st, Event e) {
    st.trace.ev.push_back(std::move(e));
    if (static_cast<int>(st.trace.ev.size()) > ctx.bounds.max_len) {
      truncated = true;
      return false;
    }
    return true;
  }

  bool emit_effop_if_due(State& st, int t, int opIdx) {
    ThreadState& th = st.threads[static_cast<std::size_t>(t)];
    OpRecord& rec = th.ops[static_cast<std::size_t>(opIdx)];
    if (rec.pending == 0 && rec.res_emitted && !rec.eff_emitted) {
      rec.eff_emitted = true;
      return emit(st, effop_ev(t, rec.label, rec.output));
    }
    return true;
  }

  // --- RELAXED pool rules -------------------------------------------------------

  static bool pending_writes_reg(const Pending& p, const std::string& r,
                                 const ObjectImpl* impl_of_op) {
    if (p.k != Pending::K::ObjAssign) return false;
    const Stmt& s = *p.stmt;
    if (s.k != Stmt::K::Assign || s.lhs_index) return false;
    if (impl_of_op)
      for (auto& v : impl_of_op->vars)
        if (v.name == s.lhs) return false;
    return s.lhs == r;
  }

  struct Access {
    std::set<std::string> reads_regs, reads_vars, writes_vars;
    std::set<std::string> writes_regs;
    bool has_load = false;
    bool writes_shared = false;
  };

  Access access_of(const Pending& p, const ObjectImpl* impl) const {
    Access a;
    if (p.k == Pending::K::ClientWrite) {
      a.writes_vars.insert("$g:" + p.var);
      a.writes_shared = true;
      return a;
    }
    if (p.k == Pending::K::CfenceMark) return a;
    const Stmt& s = *p.stmt;
    auto classify = [&](const ExprP& e) {
      std::vector<std::string> vars;
      collect_vars(e, vars);
      for (auto& n : vars) {
        if (is_objvar(impl, n)) {
          a.reads_vars.insert(n);
          a.has_load = true;
        } else {
          a.reads_regs.insert(n);
        }
      }
    };
    if (p.k == Pending::K::Branch) {
      classify(s.e1);
      return a;
    }
    // ObjAssign
    classify(s.e1);
    if (s.lhs_index) classify(s.lhs_index);
    if (is_objvar(impl, s.lhs)) {
      a.writes_vars.insert(s.lhs);
      a.writes_shared = true;
    } else {
      a.writes_regs.insert(s.lhs);
    }
    return a;
  }

  const ObjectImpl* impl_of(const State& st, int t, int opIdx) const {
    if (opIdx < 0) return nullptr;
    const OpRecord& r = st.threads[static_cast<std::size_t>(t)].ops[static_cast<std::size_t>(opIdx)];
    auto it = ctx.impls.find(r.obj);
    return it == ctx.impls.end() ? nullptr : it->second;
  }

  static bool sets_intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (auto& x : a)
      if (b.count(x)) return true;
    return false;
  }

  // Can pool entry i of thread t commit now?
  bool can_commit(const State& st, int t, std::size_t i) const {
    const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
    const Pending& p = th.pool[i];
    if (p.k == Pending::K::CfenceMark) return false;  // removed eagerly
    if (p.k == Pending::K::ClientWrite)
      for (int d : p.dep_ops)  // value derived from an op result: its write
        if (!th.ops[static_cast<std::size_t>(d)].eff_emitted) return false;
    const ObjectImpl* pimpl = impl_of(st, t, p.op_idx);
    Access pa = access_of(p, pimpl);
    bool marker_seen = false;
    for (std::size_t j = 0; j < i; ++j) {
      const Pending& q = th.pool[j];
      if (q.k == Pending::K::CfenceMark) {
        marker_seen = true;
        continue;
      }
      const ObjectImpl* qimpl = impl_of(st, t, q.op_idx);
      Access qa = access_of(q, qimpl);
      // register dependencies (in-order per register)
      if (sets_intersect(qa.writes_regs, pa.reads_regs)) return false;
      if (sets_intersect(qa.reads_regs, pa.writes_regs)) return false;
      if (sets_intersect(qa.writes_regs, pa.writes_regs)) return false;
      // same-variable accesses stay ordered (per object for obj vars)
      auto touches = [&](const Access& x) {
        std::set<std::string> s = x.reads_vars;
        s.insert(x.writes_vars.begin(), x.writes_vars.end());
        return s;
      };
      if (p.op_idx == q.op_idx || p.k == Pending::K::ClientWrite ||
          q.k == Pending::K::ClientWrite ||
          (p.op_idx >= 0 && q.op_idx >= 0)) {
        std::set<std::string> ts = touches(qa), ps = touches(pa);
        bool same_obj = true;
        if (p.op_idx >= 0 && q.op_idx >= 0 && p.op_idx != q.op_idx) {
          const auto& ops = th.ops;
          same_obj = ops[static_cast<std::size_t>(p.op_idx)].obj ==
                     ops[static_cast<std::size_t>(q.op_idx)].obj;
        }
        if (same_obj &&
            (sets_intersect(qa.writes_vars, ps) || sets_intersect(ts, pa.writes_vars)))
          return false;
      }
      if (q.k == Pending::K::Branch) {
        // stores never commit speculatively
        if (pa.writes_shared) return false;
        // loads may pass a branch unless a control fence intervenes
        if (pa.has_load && marker_seen_after(th, j, i)) return false;
        if (p.k == Pending::K::Branch) {
          // branches resolve in order (simple, sufficient)
          return false;
        }
      }
    }
    (void)marker_seen;
    return true;
  }

  static bool marker_seen_after(const ThreadState& th, std::size_t j, std::size_t i) {
    for (std::size_t k = j + 1; k < i; ++k)
      if (th.pool[k].k == Pending::K::CfenceMark) return true;
    return false;
  }

  bool reg_resolved(const ThreadState& th, const std::string& r, const State& st,
                    int t) const {
    for (auto& p : th.pool)
      if (pending_writes_reg(p, r, impl_of(st, t, p.op_idx))) return false;
    return true;
  }

  bool regs_resolved(const ThreadState& th, const ExprP& e, const State& st, int t,
                     const ObjectImpl* impl) const {
    if (!e) return true;
    std::vector<std::string> vars;
    collect_vars(e, vars);
    for (auto& n : vars) {
      if (is_objvar(impl, n)) return false;  // needs a load: not issue-resolvable
      if (!reg_resolved(th, n, st, t)) return false;
    }
    return true;
  }

  bool pool_has_branch(const ThreadState& th) const {
    for (auto& p : th.pool)
      if (p.k == Pending::K::Branch) return true;
    return false;
  }

  // Apply a committed pool entry.  Returns false when a branch guess is refuted.
  bool apply_commit(State& st, int t, std::size_t i) {
    ThreadState& th = st.threads[static_cast<std::size_t>(t)];
    Pending p = th.pool[i];
    th.pool.erase(th.pool.begin() + static_cast<std::ptrdiff_t>(i));
    if (p.k == Pending::K::ClientWrite) {
      st.globals[p.var] = p.val;
      return emit(st, eff_ev(t, p.eff_label));
    }
    if (p.k == Pending::K::CfenceMark) return true;
    OpRecord& rec = th.ops[static_cast<std::size_t>(p.op_idx)];
    const ObjectImpl* impl = ctx.impls.at(rec.obj);
    ReadFn rd = commit_reader(st, rec.obj, impl, rec);
    if (p.k == Pending::K::Branch) {
      bool taken = eval_expr(p.stmt->e1, rd).truthy();
      return taken == (p.guess != 0);
    }
    // ObjAssign
    const Stmt& s = *p.stmt;
    Value v = eval_expr(s.e1, rd);
    if (is_objvar(impl, s.lhs)) {
      std::optional<int> idx;
      if (s.lhs_index) {
        Value iv = eval_expr(s.lhs_index, rd);
        idx = iv.is_int() ? iv.num : 0;
      }
      write_objvar_mem(st, rec.obj, impl, s.lhs, idx, v);
      rec.pending--;
      emit_effop_if_due(st, t, p.op_idx);
    } else {
      rec.regs[s.lhs] = v;
    }
    return true;
  }

  // Eagerly commit invisible, deterministic pool entries: control-fence
  // markers with no earlier branch, register-only computations and in-order
  // register-only branches whose inputs are resolved.
  bool eager_pass(State& st) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t t = 0; t < st.threads.size(); ++t) {
        ThreadState& th = st.threads[t];
        for (std::size_t i = 0; i < th.pool.size(); ++i) {
          const Pending& p = th.pool[i];
          if (p.k == Pending::K::CfenceMark) {
            bool branch_before = false;
            for (std::size_t j = 0; j < i; ++j)
              if (th.pool[j].k == Pending::K::Branch) branch_before = true;
            if (!branch_before) {
              th.pool.erase(th.pool.begin() + static_cast<std::ptrdiff_t>(i));
              changed = true;
              break;
            }
            continue;
          }
          const ObjectImpl* impl = impl_of(st, static_cast<int>(t), p.op_idx);
          Access a = access_of(p, impl);
          bool invisible = !a.has_load && !a.writes_shared;
          if (!invisible) continue;
          if (!can_commit(st, static_cast<int>(t), i)) continue;
          if (!apply_commit(st, static_cast<int>(t), i)) return false;
          changed = true;
          break;
        }
      }
    }
    return true;
  }

  // --- issue actions -------------------------------------------------------------

  // Number of issue variants for thread t (0 = blocked/done).
  // Variants: branch guesses or spec transitions; otherwise 1.
  struct IssueInfo {
    int variants = 0;
  };

  // Execute one issue action; returns false if the path must be abandoned
  // (refuted guess / trace overflow).  `variant` selects among choices.
  bool issue(State& st, int t, int variant);
  int issue_variants(const State& st, int t) const;

  // helpers shared by issue paths
  bool client_assign(State& st, int t, const std::string& lhs, Value v,
                     const std::set<int>& deps);
  std::set<int> expr_deps(const ThreadState& th, const ExprP& e) const;
  bool op_issue(State& st, int t, int variant);
  int op_issue_variants(const State& st, int t) const;

  // --- exploration -----------------------------------------------------------------

  void explore(State st0) {
    if (!eager_pass(st0)) return;
    dfs(st0);
  }

  void dfs(const State& st) {
    if (++steps > step_budget) {
      truncated = true;
      return;
    }
    if (proj == Projection::Full) {
      if (!seen.insert(st).second) return;
    } else {
      State key = st;
      key.trace = project(st.trace);
      if (!seen.insert(std::move(key)).second) return;
    }
    // Any enabled action (even one whose path is later abandoned because a
    // speculation guess is refuted or the length bound trips) means this
    // trace is not maximal: the same prefix continues on a sibling path.
    bool any = false;
    int T = static_cast<int>(st.threads.size());
    // issue actions
    for (int t = 0; t < T; ++t) {
      int n = issue_variants(st, t);
      for (int v = 0; v < n; ++v) {
        any = true;
        State s2 = st;
        if (issue(s2, t, v) && eager_pass(s2)) dfs(s2);
      }
    }
    // TSO flushes
    if (ctx.model == Model::TSO) {
      for (int t = 0; t < T; ++t) {
        const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
        if (th.buffer.empty()) continue;
        any = true;
        State s2 = st;
        if (flush_one(s2, t)) dfs(s2);
      }
    }
    // RELAXED commits
    if (ctx.model == Model::RELAXED) {
      for (int t = 0; t < T; ++t) {
        const ThreadState& th = st.threads[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < th.pool.size(); ++i) {
          if (!can_commit(st, t, i)) continue;
          any = true;
          State s2 = st;
          if (apply_commit(s2, t, i) && eager_pass(s2)) dfs(s2);
        }
      }
    }
    if (!any) maximal.insert(project(st.trace));
  }

  bool truncated_overflow(const State& st) const {
    return static_cast<int>(st.trace.ev.size()) > ctx.bounds.max_len;
  }

  bool flush_one(State& st, int t) {
    ThreadState& th = st.threads[static_cast<std::size_t>(t)];
    BufWrite w = th.buffer.front();
    th.buffer.pop_front();
    if (w.is_obj) {
      auto it = ctx.impls.find(w.obj);
      write_objvar_mem(st, w.obj, it == ctx.impls.end() ? nullptr : it->second, w.var,
                       w.idx >= 0 ? std::optional<int>(w.idx) : std::nullopt, w.val);
      if (w.op_idx >= 0) {
        th.ops[static_cast<std::size_t>(w.op_idx)].pending--;
        emit_effop_if_due(st, t, w.op_idx);
      }
      return true;
    }
    st.globals[w.var] = w.val;
    return emit(st, eff_ev(t, w.eff_label));
  }
};

}  // namespace engine
}  // namespace wmm

#include "wmm/explore_issue.hpp"

namespace wmm {

// === public API ==================================================================

struct ExploreResult {
  std::vector<Trace> maximal;  // deterministic order
  bool truncated = false;

  // prefix-closed membership: reachable traces are prefixes of maximal ones
  bool contains(const Trace& t) const {
    for (const Trace& m : maximal) {
      if (t.ev.size() > m.ev.size()) continue;
      if (std::equal(t.ev.begin(), t.ev.end(), m.ev.begin())) return true;
    }
    return false;
  }

  std::set<Trace> all_prefixes() const {
    std::set<Trace> r;
    for (const Trace& m : maximal) {
      Trace p;
      r.insert(p);
      for (const Event& e : m.ev) {
        p.ev.push_back(e);
        r.insert(p);
      }
    }
    return r;
  }

  std::set<Events> obs_set() const {
    std::set<Events> r;
    for (const Trace& m : maximal) r.insert(obs(m));
    return r;
  }
};

namespace engine {

inline State initial_state(const Ctx& ctx) {
  State st;
  for (auto& [g, v] : ctx.prog->globals) st.globals[g] = v;
  for (auto& [name, impl] : ctx.impls) {
    ObjMem m;
    for (auto& d : impl->vars) {
      if (d.size > 0)
        m.arrays[d.name].assign(static_cast<std::size_t>(d.size), d.init);
      else
        m.scalars[d.name] = d.init;
    }
    st.objmem[name] = std::move(m);
  }
  for (auto& [name, sp] : ctx.specs) st.specmem[name] = sp->init;
  st.threads.resize(ctx.prog->threads.size());
  for (std::size_t t = 0; t < ctx.prog->threads.size(); ++t) {
    const Block& b = ctx.prog->threads[t];
    if (!b.stmts.empty()) st.threads[t].cur.push_back({&b, 0, nullptr, 0});
  }
  return st;
}

inline ExploreResult run_explore(const Ctx& ctx) {
  Explorer ex;
  ex.ctx = ctx;
  ex.explore(initial_state(ctx));
  ExploreResult r;
  r.maximal.assign(ex.maximal.begin(), ex.maximal.end());
  r.truncated = ex.truncated;
  return r;
}

}  // namespace engine

namespace engine {

inline Ctx concrete_ctx(const Scenario& sc) {
  Ctx ctx;
  ctx.model = sc.model;
  ctx.spec_mode = false;
  ctx.prog = &sc.program;
  ctx.bounds = sc.bounds;
  for (auto& [name, impl] : sc.impls) ctx.impls[name] = &impl;
  return ctx;
}

inline Ctx spec_ctx(const Scenario& sc) {
  Ctx ctx = concrete_ctx(sc);
  ctx.spec_mode = true;
  for (const std::string& name : sc.program.objects) {
    auto it = sc.spec_ids.find(name);
    std::string id = it != sc.spec_ids.end()
                         ? it->second
                         : default_spec_for(sc.impls.count(name) ? sc.impls.at(name).id : "");
    const ObjectSpec* sp = find_spec(id);
    if (!sp) throw ParseError("no specification bound for object '" + name + "'");
    ctx.specs[name] = sp;
  }
  return ctx;
}

}  // namespace engine

// Maximal-trace projections without materializing the trace set; see
// engine::Projection.
struct ProjectedResult {
  std::set<Trace> projected;
  bool truncated = false;
};

namespace engine {

inline ProjectedResult run_explore_projected(const Ctx& ctx, Projection p) {
  Explorer ex;
  ex.ctx = ctx;
  ex.proj = p;
  ex.explore(initial_state(ctx));
  return ProjectedResult{std::move(ex.maximal), ex.truncated};
}

}  // namespace engine

// All traces of the program with the bound implementations under the model.
inline ExploreResult enumerate_traces(const Scenario& sc) {
  return engine::run_explore(engine::concrete_ctx(sc));
}

// Traces of the program with every object replaced by its atomic
// specification: operation calls execute as contiguous inv/effop/res blocks,
// a call is only invoked once all previously invoked calls have taken effect,
// and program steps still follow the memory model.
inline ExploreResult spec_traces(const Scenario& sc) {
  return engine::run_explore(engine::spec_ctx(sc));
}

// Observable behaviours (eff-subsequences of maximal traces) of the concrete
// and abstract sides, computed in projected mode.
inline ProjectedResult concrete_obs(const Scenario& sc) {
  return engine::run_explore_projected(engine::concrete_ctx(sc), engine::Projection::Obs);
}

inline ProjectedResult abstract_obs(const Scenario& sc) {
  return engine::run_explore_projected(engine::spec_ctx(sc), engine::Projection::Obs);
}

// The histories the scenario's program induces on its objects: the
// prefix-closed inv/res projections of its traces.
inline ProjectedResult induced_histories(const Scenario& sc) {
  ProjectedResult r =
      engine::run_explore_projected(engine::concrete_ctx(sc), engine::Projection::InvRes);
  std::set<Trace> closed;
  for (const Trace& h : r.projected) {
    Trace p;
    closed.insert(p);
    for (const Event& e : h.ev) {
      p.ev.push_back(e);
      closed.insert(p);
    }
  }
  r.projected = std::move(closed);
  return r;
}

}  // namespace wmm
