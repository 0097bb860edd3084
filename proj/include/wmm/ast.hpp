#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wmm/value.hpp"

namespace wmm {

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
  enum class K { Const, Var, Index, Unary, Binary };
  K k = K::Const;
  Value cval;        // Const
  std::string name;  // Var / Index (array name)
  std::string op;    // Unary: "!", "-"; Binary: = != < <= > >= + - * mod && ||
  ExprP a, b;

  static ExprP constant(Value v) {
    auto e = std::make_shared<Expr>();
    e->k = K::Const;
    e->cval = v;
    return e;
  }
  static ExprP var(std::string n) {
    auto e = std::make_shared<Expr>();
    e->k = K::Var;
    e->name = std::move(n);
    return e;
  }
  static ExprP index(std::string n, ExprP i) {
    auto e = std::make_shared<Expr>();
    e->k = K::Index;
    e->name = std::move(n);
    e->a = std::move(i);
    return e;
  }
  static ExprP unary(std::string o, ExprP x) {
    auto e = std::make_shared<Expr>();
    e->k = K::Unary;
    e->op = std::move(o);
    e->a = std::move(x);
    return e;
  }
  static ExprP binary(std::string o, ExprP x, ExprP y) {
    auto e = std::make_shared<Expr>();
    e->k = K::Binary;
    e->op = std::move(o);
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
};

// Variables read by an expression (globals, registers and object variables
// alike; resolution is contextual).
inline void collect_vars(const ExprP& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->k == Expr::K::Var || e->k == Expr::K::Index) out.push_back(e->name);
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

inline std::string render_expr(const ExprP& e);

inline int expr_prec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "=" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") return 3;
  if (op == "+" || op == "-") return 4;
  return 5;  // * mod
}

inline std::string render_expr_prec(const ExprP& e, int parent) {
  switch (e->k) {
    case Expr::K::Const: return to_string(e->cval);
    case Expr::K::Var: return e->name;
    case Expr::K::Index: return e->name + "[" + render_expr(e->a) + "]";
    case Expr::K::Unary: return e->op + render_expr_prec(e->a, 6);
    case Expr::K::Binary: {
      int p = expr_prec(e->op);
      std::string sep = (p <= 3) ? e->op : (" " + e->op + " ");
      if (e->op == "mod") sep = " mod ";
      std::string s = render_expr_prec(e->a, p) + sep + render_expr_prec(e->b, p + 1);
      if (p < parent) s = "(" + s + ")";
      return s;
    }
  }
  return "?";
}

inline std::string render_expr(const ExprP& e) { return render_expr_prec(e, 0); }

struct Block;
struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;
using BlockP = std::shared_ptr<const Block>;

struct Block {
  std::vector<StmtP> stmts;
};

struct Stmt {
  enum class K { Assign, OpCall, Tas, Cas, Await, Fence, CFence, If, While, Return };
  K k = K::Assign;
  std::string lhs;       // Assign/OpCall/Tas/Cas result target ("" if none)
  ExprP lhs_index;       // array element assignment (object code)
  std::string obj, op;   // OpCall
  std::string var;       // Tas/Cas shared variable
  ExprP e1, e2;          // Assign: e1=rhs. OpCall: e1=arg. Tas/Cas: e1=expect,e2=new.
                         // Await/If/While: e1=cond. Return: e1 (may be null).
  BlockP body, els;      // If/While bodies
  int sid = 0;           // unique static id within its program/object

  std::string cond_src(const char* kw) const {
    return std::string(kw) + "(" + render_expr(e1) + ")";
  }
};

struct VarDecl {
  std::string name;
  int size = 0;  // 0 = scalar, >0 = array length
  Value init = Value::integer(0);
};

struct OpDef {
  std::string param;  // "" when none
  BlockP body;
};

// An object implementation: encapsulated variables plus operation bodies in
// the statement language.
struct ObjectImpl {
  std::string id;  // library id or inline object name
  std::vector<VarDecl> vars;
  std::map<std::string, OpDef> ops;

  bool op_writes_shared(const std::string& opName) const;   // may write
  bool op_always_writes(const std::string& opName) const;   // writes on every path
};

struct Program {
  std::vector<std::pair<std::string, Value>> globals;  // declaration order
  ValueDomain vals = default_domain();
  std::vector<Block> threads;
  std::vector<std::string> objects;  // object names referenced

  bool is_global(const std::string& n) const {
    for (auto& [g, v] : globals)
      if (g == n) return true;
    return false;
  }
  Value global_init(const std::string& n) const {
    for (auto& [g, v] : globals)
      if (g == n) return v;
    return Value::integer(0);
  }
};

// --- static helpers ----------------------------------------------------------

namespace detail {
inline bool block_writes_shared(const Block& b, const ObjectImpl& o);

inline bool stmt_writes_shared(const Stmt& s, const ObjectImpl& o) {
  switch (s.k) {
    case Stmt::K::Assign: {
      if (s.lhs_index) return true;
      for (auto& v : o.vars)
        if (v.name == s.lhs) return true;
      return false;
    }
    case Stmt::K::Tas:
    case Stmt::K::Cas:
      return true;
    case Stmt::K::If:
      return (s.body && block_writes_shared(*s.body, o)) ||
             (s.els && block_writes_shared(*s.els, o));
    case Stmt::K::While:
      return s.body && block_writes_shared(*s.body, o);
    default:
      return false;
  }
}

inline bool block_writes_shared(const Block& b, const ObjectImpl& o) {
  for (auto& s : b.stmts)
    if (stmt_writes_shared(*s, o)) return true;
  return false;
}
}  // namespace detail

namespace detail {
inline bool block_must_write(const Block& b, const ObjectImpl& o);

inline bool stmt_must_write(const Stmt& s, const ObjectImpl& o) {
  switch (s.k) {
    case Stmt::K::Assign: {
      if (s.lhs_index) return true;
      for (auto& v : o.vars)
        if (v.name == s.lhs) return true;
      return false;
    }
    case Stmt::K::If:
      return s.body && s.els && block_must_write(*s.body, o) &&
             block_must_write(*s.els, o);
    default:
      return false;  // Tas/Cas may fail without writing; loops may not run
  }
}

inline bool block_must_write(const Block& b, const ObjectImpl& o) {
  for (auto& s : b.stmts)
    if (stmt_must_write(*s, o)) return true;
  return false;
}
}  // namespace detail

inline bool ObjectImpl::op_writes_shared(const std::string& opName) const {
  auto it = ops.find(opName);
  if (it == ops.end()) return false;
  return it->second.body && detail::block_writes_shared(*it->second.body, *this);
}

inline bool ObjectImpl::op_always_writes(const std::string& opName) const {
  auto it = ops.find(opName);
  if (it == ops.end()) return false;
  return it->second.body && detail::block_must_write(*it->second.body, *this);
}

}  // namespace wmm
