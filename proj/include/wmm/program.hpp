#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wmm/ast.hpp"
#include "wmm/event.hpp"

namespace wmm {

enum class Model { SC, TSO, RELAXED };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::SC: return "sc";
    case Model::TSO: return "tso";
    case Model::RELAXED: return "relaxed";
  }
  return "?";
}

inline std::optional<Model> parse_model(const std::string& s) {
  if (s == "sc") return Model::SC;
  if (s == "tso") return Model::TSO;
  if (s == "relaxed" || s == "arm" || s == "power") return Model::RELAXED;
  return std::nullopt;
}

struct Bounds {
  int max_len = 80;   // events per trace
  int unroll = 3;     // loop iterations per loop instance
  int window = 6;     // pending commits per thread (relaxed)
  int calls = 2;      // driver calls per thread
  bool strict = false;
};

struct DriverMenuEntry {
  std::string op;
  std::optional<Value> arg;  // nullopt: no argument; value may be a literal
  bool all_inputs = false;   // op(*): one entry per domain value
};

struct DriverShape {
  std::string object;
  std::vector<std::vector<DriverMenuEntry>> menus;  // one menu per thread
  int calls = 2;
};

struct Scenario {
  std::string name;
  Model model = Model::SC;
  Program program;
  std::map<std::string, ObjectImpl> impls;      // object name -> implementation
  std::map<std::string, std::string> impl_ids;  // object name -> library id ("" = inline)
  std::map<std::string, std::string> spec_ids;  // object name -> spec id
  Bounds bounds;
  std::vector<std::pair<std::string, std::string>> expects;  // checker -> verdict
  std::optional<DriverShape> driver;
};

// Resolves `object <name> = <library-id>` declarations.
using ImplResolver = std::function<const ObjectImpl*(const std::string& id)>;

// --- lexer -------------------------------------------------------------------

namespace parse_detail {

struct Token {
  enum class K { Ident, Num, Punct, End } k = K::End;
  std::string text;
  int line = 0;
};

struct Lexer {
  std::vector<Token> toks;
  std::size_t pos = 0;

  explicit Lexer(const std::string& src) {
    int line = 1;
    std::size_t i = 0;
    auto isid = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
             (c >= '0' && c <= '9') || c == '_';
    };
    while (i < src.size()) {
      char c = src[i];
      if (c == '\n') { ++line; ++i; continue; }
      if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
      if (c == '#') {
        while (i < src.size() && src[i] != '\n') ++i;
        continue;
      }
      if (isid(c) && !(c >= '0' && c <= '9')) {
        std::size_t j = i;
        while (j < src.size() && isid(src[j])) ++j;
        toks.push_back({Token::K::Ident, src.substr(i, j - i), line});
        i = j;
        continue;
      }
      if (c >= '0' && c <= '9') {
        std::size_t j = i;
        while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
        toks.push_back({Token::K::Num, src.substr(i, j - i), line});
        i = j;
        continue;
      }
      auto two = src.substr(i, 2);
      if (two == "<=" || two == ">=" || two == "!=" || two == "&&" || two == "||" ||
          two == ":=") {
        toks.push_back({Token::K::Punct, two, line});
        i += 2;
        continue;
      }
      static const std::string singles = "=<>!+-*(){}[];:,.";
      if (singles.find(c) != std::string::npos) {
        toks.push_back({Token::K::Punct, std::string(1, c), line});
        ++i;
        continue;
      }
      throw ParseError("line " + std::to_string(line) + ": unexpected character '" +
                       std::string(1, c) + "'");
    }
    toks.push_back({Token::K::End, "", line});
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t p = pos + ahead;
    return p < toks.size() ? toks[p] : toks.back();
  }
  Token next() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
  bool at(const std::string& t) const {
    return peek().k == Token::K::Punct && peek().text == t;
  }
  bool at_ident(const std::string& t) const {
    return peek().k == Token::K::Ident && peek().text == t;
  }
  bool eat(const std::string& t) {
    if (at(t)) { ++pos; return true; }
    return false;
  }
  void expect(const std::string& t) {
    if (!eat(t)) fail("expected '" + t + "'");
  }
  std::string expect_ident() {
    if (peek().k != Token::K::Ident) fail("expected identifier");
    return next().text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(peek().line) + ": " + msg +
                     " (got '" + peek().text + "')");
  }
};

struct Parser {
  Lexer lx;
  ImplResolver resolver;
  bool allow_reserved = false;
  int next_sid = 1;

  explicit Parser(const std::string& src, ImplResolver r, bool reserved)
      : lx(src), resolver(std::move(r)), allow_reserved(reserved) {}

  void check_name(const std::string& n) {
    if (!allow_reserved && n.rfind("__", 0) == 0)
      lx.fail("identifier '" + n + "' uses the reserved '__' prefix");
  }

  // dotted library ids: spinlock, chaselev.cfence_fixed, ...
  std::string dotted_ident() {
    std::string s = lx.expect_ident();
    while (lx.eat(".")) s += "." + lx.expect_ident();
    return s;
  }

  Value expect_value() {
    bool neg = lx.eat("-");
    const Token& t = lx.peek();
    if (t.k == Token::K::Num) {
      int v = std::stoi(lx.next().text);
      return Value::integer(neg ? -v : v);
    }
    if (t.k == Token::K::Ident) {
      auto v = parse_value(t.text);
      if (v && !neg) { lx.next(); return *v; }
    }
    if (lx.at("_")) {}
    if (t.k == Token::K::Punct && t.text == "_") { lx.next(); return Value::bot(); }
    lx.fail("expected value");
  }

  // --- expressions ---------------------------------------------------------

  ExprP primary() {
    if (lx.eat("(")) {
      ExprP e = expr();
      lx.expect(")");
      return e;
    }
    if (lx.eat("!")) return Expr::unary("!", primary());
    if (lx.eat("-")) return Expr::unary("-", primary());
    const Token& t = lx.peek();
    if (t.k == Token::K::Num) return Expr::constant(Value::integer(std::stoi(lx.next().text)));
    if (t.k == Token::K::Ident) {
      std::string n = lx.next().text;
      if (n == "empty") return Expr::constant(Value::empty());
      if (n == "fail") return Expr::constant(Value::fail());
      if (n == "true") return Expr::constant(Value::integer(1));
      if (n == "false") return Expr::constant(Value::integer(0));
      if (lx.eat("[")) {
        ExprP i = expr();
        lx.expect("]");
        return Expr::index(n, i);
      }
      return Expr::var(n);
    }
    if (t.k == Token::K::Punct && t.text == "_") {
      lx.next();
      return Expr::constant(Value::bot());
    }
    lx.fail("expected expression");
  }

  ExprP mul_expr() {
    ExprP e = primary();
    while (true) {
      if (lx.eat("*")) e = Expr::binary("*", e, primary());
      else if (lx.at_ident("mod")) { lx.next(); e = Expr::binary("mod", e, primary()); }
      else return e;
    }
  }
  ExprP add_expr() {
    ExprP e = mul_expr();
    while (true) {
      if (lx.eat("+")) e = Expr::binary("+", e, mul_expr());
      else if (lx.eat("-")) e = Expr::binary("-", e, mul_expr());
      else return e;
    }
  }
  ExprP cmp_expr() {
    ExprP e = add_expr();
    while (true) {
      std::string op;
      for (const char* c : {"<=", ">=", "!=", "=", "<", ">"})
        if (lx.at(c)) { op = c; break; }
      if (op.empty()) return e;
      lx.next();
      e = Expr::binary(op, e, add_expr());
    }
  }
  ExprP and_expr() {
    ExprP e = cmp_expr();
    while (lx.eat("&&")) e = Expr::binary("&&", e, cmp_expr());
    return e;
  }
  ExprP expr() {
    ExprP e = and_expr();
    while (lx.eat("||")) e = Expr::binary("||", e, and_expr());
    return e;
  }

  // --- statements ------------------------------------------------------------

  BlockP block() {
    auto b = std::make_shared<Block>();
    lx.expect("{");
    while (!lx.eat("}")) b->stmts.push_back(stmt());
    return b;
  }

  StmtP stmt() {
    auto s = std::make_shared<Stmt>();
    s->sid = next_sid++;
    if (lx.at_ident("await")) {
      lx.next();
      lx.expect("(");
      s->k = Stmt::K::Await;
      s->e1 = expr();
      lx.expect(")");
      lx.expect(";");
      return s;
    }
    if (lx.at_ident("fence")) {
      lx.next();
      lx.expect(";");
      s->k = Stmt::K::Fence;
      return s;
    }
    if (lx.at_ident("cfence")) {
      lx.next();
      lx.expect(";");
      s->k = Stmt::K::CFence;
      return s;
    }
    if (lx.at_ident("if")) {
      lx.next();
      lx.expect("(");
      s->k = Stmt::K::If;
      s->e1 = expr();
      lx.expect(")");
      s->body = block();
      if (lx.at_ident("else")) {
        lx.next();
        s->els = block();
      }
      return s;
    }
    if (lx.at_ident("while")) {
      lx.next();
      lx.expect("(");
      s->k = Stmt::K::While;
      s->e1 = expr();
      lx.expect(")");
      s->body = block();
      return s;
    }
    if (lx.at_ident("return")) {
      lx.next();
      s->k = Stmt::K::Return;
      if (!lx.at(";")) s->e1 = expr();
      lx.expect(";");
      return s;
    }

    // assignment / call forms
    std::string name = lx.expect_ident();
    check_name(name);
    if (lx.eat("[")) {  // array element assignment (object code)
      s->k = Stmt::K::Assign;
      s->lhs = name;
      s->lhs_index = expr();
      lx.expect("]");
      lx.expect("=");
      s->e1 = expr();
      lx.expect(";");
      return s;
    }
    if (lx.eat(".")) {  // bare call: obj.op(arg?);
      s->k = Stmt::K::OpCall;
      s->obj = name;
      s->op = lx.expect_ident();
      lx.expect("(");
      if (!lx.at(")")) s->e1 = expr();
      lx.expect(")");
      lx.expect(";");
      return s;
    }
    if (!lx.eat("=") && !lx.eat(":=")) lx.fail("expected '=' in statement");
    // TAS/CAS
    if (lx.at_ident("TAS") || lx.at_ident("CAS")) {
      s->k = lx.at_ident("TAS") ? Stmt::K::Tas : Stmt::K::Cas;
      lx.next();
      lx.expect("(");
      s->lhs = name;
      s->var = lx.expect_ident();
      lx.expect(",");
      s->e1 = expr();
      lx.expect(",");
      s->e2 = expr();
      lx.expect(")");
      lx.expect(";");
      return s;
    }
    // opcall with result: r = obj.op(arg?)
    if (lx.peek().k == Token::K::Ident && lx.peek(1).k == Token::K::Punct &&
        lx.peek(1).text == "." && lx.peek(2).k == Token::K::Ident &&
        lx.peek(3).text == "(") {
      s->k = Stmt::K::OpCall;
      s->lhs = name;
      s->obj = lx.expect_ident();
      lx.expect(".");
      s->op = lx.expect_ident();
      lx.expect("(");
      if (!lx.at(")")) s->e1 = expr();
      lx.expect(")");
      lx.expect(";");
      return s;
    }
    s->k = Stmt::K::Assign;
    s->lhs = name;
    s->e1 = expr();
    lx.expect(";");
    return s;
  }

  // --- top level ---------------------------------------------------------------

  Scenario scenario() {
    Scenario sc;
    bool saw_model = false;
    while (lx.peek().k != Token::K::End) {
      if (lx.peek().k != Token::K::Ident) lx.fail("expected declaration");
      std::string kw = lx.peek().text;
      if (kw == "model") {
        lx.next();
        lx.expect(":");
        std::string m = lx.expect_ident();
        auto mm = parse_model(m);
        if (!mm) lx.fail("unknown model '" + m + "'");
        sc.model = *mm;
        saw_model = true;
      } else if (kw == "name") {
        lx.next();
        lx.expect(":");
        sc.name = dotted_ident();
      } else if (kw == "vals") {
        lx.next();
        lx.expect(":");
        sc.program.vals.clear();
        sc.program.vals.push_back(expect_value());
        while (lx.eat(",")) sc.program.vals.push_back(expect_value());
      } else if (kw == "globals") {
        lx.next();
        lx.expect(":");
        do {
          std::string g = lx.expect_ident();
          check_name(g);
          lx.expect("=");
          sc.program.globals.emplace_back(g, expect_value());
        } while (lx.eat(","));
      } else if (kw == "bounds") {
        lx.next();
        lx.expect(":");
        do {
          std::string key = lx.expect_ident();
          lx.expect("=");
          Value v = expect_value();
          int n = v.is_int() ? v.num : 0;
          if (key == "max_len") sc.bounds.max_len = n;
          else if (key == "unroll") sc.bounds.unroll = n;
          else if (key == "window") sc.bounds.window = n;
          else if (key == "calls") sc.bounds.calls = n;
          else lx.fail("unknown bound '" + key + "'");
        } while (lx.eat(","));
      } else if (kw == "expect") {
        lx.next();
        lx.expect(":");
        do {
          std::string checker = lx.expect_ident();
          lx.expect("=");
          sc.expects.emplace_back(checker, lx.expect_ident());
        } while (lx.eat(","));
      } else if (kw == "object") {
        lx.next();
        std::string name = lx.expect_ident();
        check_name(name);
        if (lx.eat("=")) {
          std::string id = dotted_ident();
          const ObjectImpl* impl = resolver ? resolver(id) : nullptr;
          if (!impl) lx.fail("unknown object implementation '" + id + "'");
          sc.impls[name] = *impl;
          sc.impl_ids[name] = id;
        } else {
          sc.impls[name] = inline_object(name);
          sc.impl_ids[name] = "";
        }
        sc.program.objects.push_back(name);
      } else if (kw == "spec") {
        lx.next();
        std::string name = lx.expect_ident();
        lx.expect("=");
        sc.spec_ids[name] = dotted_ident();
      } else if (kw == "thread") {
        lx.next();
        BlockP b = block();
        sc.program.threads.push_back(*b);
      } else if (kw == "driver") {
        lx.next();
        DriverShape d;
        d.object = lx.expect_ident();
        lx.expect("{");
        while (!lx.eat("}")) {
          if (lx.at_ident("menu")) {
            lx.next();
            lx.expect("{");
            std::vector<DriverMenuEntry> menu;
            while (!lx.eat("}")) {
              DriverMenuEntry e;
              e.op = lx.expect_ident();
              lx.expect("(");
              if (!lx.at(")")) {
                if (lx.eat("*")) e.all_inputs = true;
                else e.arg = expect_value();
              }
              lx.expect(")");
              lx.expect(";");
              menu.push_back(e);
            }
            d.menus.push_back(std::move(menu));
          } else if (lx.at_ident("calls")) {
            lx.next();
            lx.expect(":");
            Value v = expect_value();
            d.calls = v.num;
            lx.eat(";");
          } else {
            lx.fail("expected 'menu' or 'calls' in driver");
          }
        }
        sc.driver = std::move(d);
      } else {
        lx.fail("unknown declaration '" + kw + "'");
      }
    }
    (void)saw_model;
    validate(sc);
    return sc;
  }

  ObjectImpl inline_object(const std::string& name) {
    ObjectImpl o;
    o.id = name;
    lx.expect("{");
    while (!lx.eat("}")) {
      if (lx.at_ident("var")) {
        lx.next();
        VarDecl v;
        v.name = lx.expect_ident();
        check_name(v.name);
        if (lx.eat("[")) {
          const Token& t = lx.peek();
          if (t.k != Token::K::Num) lx.fail("expected array size");
          v.size = std::stoi(lx.next().text);
          lx.expect("]");
        }
        lx.expect("=");
        v.init = expect_value();
        lx.expect(";");
        o.vars.push_back(v);
      } else if (lx.at_ident("op")) {
        lx.next();
        std::string opName = lx.expect_ident();
        OpDef d;
        lx.expect("(");
        if (!lx.at(")")) d.param = lx.expect_ident();
        lx.expect(")");
        d.body = block();
        o.ops[opName] = d;
      } else {
        lx.fail("expected 'var' or 'op' in object");
      }
    }
    return o;
  }

  // --- validation ---------------------------------------------------------

  void validate(const Scenario& sc) {
    // undeclared variables and unknown objects/operations, per thread
    for (std::size_t ti = 0; ti < sc.program.threads.size(); ++ti) {
      std::set<std::string> regs;
      validate_block(sc, sc.program.threads[ti], nullptr, regs,
                     "thread " + std::to_string(ti + 1));
    }
    for (auto& [name, impl] : sc.impls) {
      for (auto& [opName, def] : impl.ops) {
        std::set<std::string> regs;
        if (!def.param.empty()) regs.insert(def.param);
        validate_block(sc, *def.body, &impl, regs, name + "." + opName);
      }
    }
  }

  void validate_block(const Scenario& sc, const Block& b, const ObjectImpl* obj,
                      std::set<std::string>& regs, const std::string& where) {
    auto is_objvar = [&](const std::string& n) {
      if (!obj) return false;
      for (auto& v : obj->vars)
        if (v.name == n) return true;
      return false;
    };
    auto check_expr = [&](const ExprP& e) {
      std::vector<std::string> vars;
      collect_vars(e, vars);
      for (auto& n : vars) {
        if (sc.program.is_global(n) && !obj) continue;
        if (is_objvar(n)) continue;
        if (regs.count(n)) continue;
        throw ParseError("undeclared variable '" + n + "' in " + where);
      }
    };
    for (const StmtP& sp : b.stmts) {
      const Stmt& s = *sp;
      switch (s.k) {
        case Stmt::K::Assign:
          if (s.lhs_index) check_expr(s.lhs_index);
          check_expr(s.e1);
          if (!sc.program.is_global(s.lhs) && !is_objvar(s.lhs)) regs.insert(s.lhs);
          break;
        case Stmt::K::OpCall: {
          if (obj) throw ParseError("nested operation call in " + where);
          auto it = sc.impls.find(s.obj);
          if (it == sc.impls.end())
            throw ParseError("unknown object '" + s.obj + "' in " + where);
          if (!it->second.ops.count(s.op))
            throw ParseError("unknown operation '" + s.obj + "." + s.op + "' in " + where);
          if (s.e1) check_expr(s.e1);
          if (!s.lhs.empty() && !sc.program.is_global(s.lhs)) regs.insert(s.lhs);
          break;
        }
        case Stmt::K::Tas:
        case Stmt::K::Cas:
          if (!is_objvar(s.var) && !sc.program.is_global(s.var))
            throw ParseError("unknown variable '" + s.var + "' in " + where);
          check_expr(s.e1);
          check_expr(s.e2);
          if (!s.lhs.empty() && !sc.program.is_global(s.lhs) && !is_objvar(s.lhs))
            regs.insert(s.lhs);
          break;
        case Stmt::K::Await:
        case Stmt::K::Return:
          if (s.e1) check_expr(s.e1);
          break;
        case Stmt::K::Fence:
        case Stmt::K::CFence:
          break;
        case Stmt::K::If:
          check_expr(s.e1);
          if (s.body) validate_block(sc, *s.body, obj, regs, where);
          if (s.els) validate_block(sc, *s.els, obj, regs, where);
          break;
        case Stmt::K::While:
          check_expr(s.e1);
          if (s.body) validate_block(sc, *s.body, obj, regs, where);
          break;
      }
    }
  }
};

}  // namespace parse_detail

inline Scenario parse_scenario(const std::string& text, ImplResolver resolver = {},
                               bool allow_reserved = false) {
  parse_detail::Parser p(text, std::move(resolver), allow_reserved);
  return p.scenario();
}

// Parse just the program parts (threads/globals/vals) of a scenario text.
inline Program parse_program(const std::string& text, ImplResolver resolver = {}) {
  return parse_scenario(text, std::move(resolver)).program;
}

// --- rendering ---------------------------------------------------------------

namespace render_detail {

inline void render_block(std::ostringstream& os, const Block& b, int indent);

inline void render_stmt(std::ostringstream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad;
  switch (s.k) {
    case Stmt::K::Assign:
      if (s.lhs_index)
        os << s.lhs << "[" << render_expr(s.lhs_index) << "] = " << render_expr(s.e1) << ";\n";
      else
        os << s.lhs << " = " << render_expr(s.e1) << ";\n";
      break;
    case Stmt::K::OpCall:
      if (!s.lhs.empty()) os << s.lhs << " = ";
      os << s.obj << "." << s.op << "(" << (s.e1 ? render_expr(s.e1) : "") << ");\n";
      break;
    case Stmt::K::Tas:
    case Stmt::K::Cas:
      os << s.lhs << " = " << (s.k == Stmt::K::Tas ? "TAS" : "CAS") << "(" << s.var
         << ", " << render_expr(s.e1) << ", " << render_expr(s.e2) << ");\n";
      break;
    case Stmt::K::Await:
      os << "await(" << render_expr(s.e1) << ");\n";
      break;
    case Stmt::K::Fence:
      os << "fence;\n";
      break;
    case Stmt::K::CFence:
      os << "cfence;\n";
      break;
    case Stmt::K::If:
      os << "if (" << render_expr(s.e1) << ") ";
      render_block(os, *s.body, indent);
      if (s.els) {
        os << pad << "else ";
        render_block(os, *s.els, indent);
      }
      break;
    case Stmt::K::While:
      os << "while (" << render_expr(s.e1) << ") ";
      render_block(os, *s.body, indent);
      break;
    case Stmt::K::Return:
      os << "return" << (s.e1 ? " " + render_expr(s.e1) : "") << ";\n";
      break;
  }
}

inline void render_block(std::ostringstream& os, const Block& b, int indent) {
  os << "{\n";
  for (auto& s : b.stmts) render_stmt(os, *s, indent + 1);
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "}\n";
}

}  // namespace render_detail

inline std::string render_scenario(const Scenario& sc) {
  std::ostringstream os;
  if (!sc.name.empty()) os << "name: " << sc.name << "\n";
  os << "model: " << to_string(sc.model) << "\n";
  os << "vals: ";
  for (std::size_t i = 0; i < sc.program.vals.size(); ++i)
    os << (i ? "," : "") << to_string(sc.program.vals[i]);
  os << "\n";
  if (!sc.program.globals.empty()) {
    os << "globals: ";
    for (std::size_t i = 0; i < sc.program.globals.size(); ++i)
      os << (i ? ", " : "") << sc.program.globals[i].first << "="
         << to_string(sc.program.globals[i].second);
    os << "\n";
  }
  for (const std::string& name : sc.program.objects) {
    auto idIt = sc.impl_ids.find(name);
    if (idIt != sc.impl_ids.end() && !idIt->second.empty()) {
      os << "object " << name << " = " << idIt->second << "\n";
    } else {
      const ObjectImpl& o = sc.impls.at(name);
      os << "object " << name << " {\n";
      for (auto& v : o.vars) {
        os << "  var " << v.name;
        if (v.size > 0) os << "[" << v.size << "]";
        os << " = " << to_string(v.init) << ";\n";
      }
      for (auto& [opName, def] : o.ops) {
        os << "  op " << opName << "(" << def.param << ") ";
        std::ostringstream body;
        render_detail::render_block(body, *def.body, 1);
        os << body.str();
      }
      os << "}\n";
    }
    auto sIt = sc.spec_ids.find(name);
    if (sIt != sc.spec_ids.end()) os << "spec " << name << " = " << sIt->second << "\n";
  }
  for (const Block& t : sc.program.threads) {
    os << "thread ";
    std::ostringstream body;
    render_detail::render_block(body, t, 0);
    os << body.str();
  }
  if (sc.driver) {
    os << "driver " << sc.driver->object << " {\n";
    for (auto& menu : sc.driver->menus) {
      os << "  menu { ";
      for (auto& e : menu) {
        os << e.op << "(";
        if (e.all_inputs) os << "*";
        else if (e.arg) os << to_string(*e.arg);
        os << "); ";
      }
      os << "}\n";
    }
    os << "  calls: " << sc.driver->calls << ";\n";
    os << "}\n";
  }
  os << "bounds: max_len=" << sc.bounds.max_len << ", unroll=" << sc.bounds.unroll
     << ", window=" << sc.bounds.window << ", calls=" << sc.bounds.calls << "\n";
  if (!sc.expects.empty()) {
    os << "expect: ";
    for (std::size_t i = 0; i < sc.expects.size(); ++i)
      os << (i ? ", " : "") << sc.expects[i].first << "=" << sc.expects[i].second;
    os << "\n";
  }
  return os.str();
}

}  // namespace wmm
