#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wmm/value.hpp"

namespace wmm {

// Thread identifiers are zero-based internally and render as T1, T2, ...
using ThreadId = int;

inline std::string thread_name(ThreadId t) { return "T" + std::to_string(t + 1); }

// Events of the algebra.  Program steps and their effects carry a resolved
// statement label ("z=1", "await(z=1)", "fence", ...); object events carry
// the operation call label ("sl.acquire") and an input/output value.
//
// Labels double as identity: engines suffix "#<n>" (per-thread instance
// number) when the same label could otherwise occur twice in a trace, and
// "@<path>" when branch paths must be told apart, so traces stay
// duplicate-free.
struct Event {
  enum class Kind : std::uint8_t { Step, Eff, Inv, Res, EffOp };

  Kind kind = Kind::Step;
  ThreadId thread = 0;
  std::string label;
  Value value = Value::bot();  // object events only

  bool is_prog() const { return kind == Kind::Step || kind == Kind::Eff; }
  bool is_obj() const { return !is_prog(); }
  bool is_response() const { return kind == Kind::Res || kind == Kind::EffOp; }

  // A program step writes a global program variable iff its label has the
  // assignment shape "name=value" (awaits, fences and branch evaluations
  // don't).
  bool writes_global() const {
    if (!is_prog()) return false;
    auto eq = label.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    for (std::size_t i = 0; i < eq; ++i) {
      char c = label[i];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '_';
      if (!ok) return false;
    }
    return true;
  }

  // Global written by this program step, if any.
  std::string written_global() const {
    if (!writes_global()) return {};
    return label.substr(0, label.find('='));
  }

  // Written value (for replaying final states from effect events).
  std::optional<Value> written_value() const {
    if (!writes_global()) return std::nullopt;
    auto eq = label.find('=');
    std::string rhs = label.substr(eq + 1);
    auto hash = rhs.find('#');
    if (hash != std::string::npos) rhs = rhs.substr(0, hash);
    auto at = rhs.find('@');
    if (at != std::string::npos) rhs = rhs.substr(0, at);
    return parse_value(rhs);
  }

  friend auto operator<=>(const Event&, const Event&) = default;
};

inline Event step_ev(ThreadId t, std::string label) {
  return Event{Event::Kind::Step, t, std::move(label), Value::bot()};
}
inline Event eff_ev(ThreadId t, std::string label) {
  return Event{Event::Kind::Eff, t, std::move(label), Value::bot()};
}
inline Event inv_ev(ThreadId t, std::string op, Value in = Value::bot()) {
  return Event{Event::Kind::Inv, t, std::move(op), in};
}
inline Event res_ev(ThreadId t, std::string op, Value out = Value::bot()) {
  return Event{Event::Kind::Res, t, std::move(op), out};
}
inline Event effop_ev(ThreadId t, std::string op, Value out = Value::bot()) {
  return Event{Event::Kind::EffOp, t, std::move(op), out};
}

// ---------------------------------------------------------------------------
// Canonical syntax:
//   step(T1,"z=1")   eff(T1,"z=1")
//   inv(T2,sl.acquire,_)   res(T3,sl.tryAcquire,0)   effop(T3,sl.tryAcquire,0)

inline std::string render_event(const Event& e) {
  switch (e.kind) {
    case Event::Kind::Step:
      return "step(" + thread_name(e.thread) + ",\"" + e.label + "\")";
    case Event::Kind::Eff:
      return "eff(" + thread_name(e.thread) + ",\"" + e.label + "\")";
    case Event::Kind::Inv:
      return "inv(" + thread_name(e.thread) + "," + e.label + "," + to_string(e.value) + ")";
    case Event::Kind::Res:
      return "res(" + thread_name(e.thread) + "," + e.label + "," + to_string(e.value) + ")";
    case Event::Kind::EffOp:
      return "effop(" + thread_name(e.thread) + "," + e.label + "," + to_string(e.value) + ")";
  }
  throw std::logic_error("render_event: bad kind");
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::optional<Event> try_parse_event(std::string_view s) {
  auto lp = s.find('(');
  if (lp == std::string_view::npos || s.empty() || s.back() != ')')
    return std::nullopt;
  std::string_view head = s.substr(0, lp);
  std::string_view body = s.substr(lp + 1, s.size() - lp - 2);

  auto comma = body.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  std::string_view tname = body.substr(0, comma);
  if (tname.size() < 2 || tname[0] != 'T') return std::nullopt;
  int thread = 0;
  for (std::size_t i = 1; i < tname.size(); ++i) {
    if (tname[i] < '0' || tname[i] > '9') return std::nullopt;
    thread = thread * 10 + (tname[i] - '0');
  }
  thread -= 1;
  std::string_view rest = body.substr(comma + 1);

  if (head == "step" || head == "eff") {
    Event::Kind k = (head == "step") ? Event::Kind::Step : Event::Kind::Eff;
    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"')
      return Event{k, thread, std::string(rest.substr(1, rest.size() - 2)), Value::bot()};
    // tolerate unquoted labels when unambiguous
    if (head == "eff" && rest.find(',') != std::string_view::npos) {
      // fall through: an eff with a comma-separated value is an object effect
    } else {
      return Event{k, thread, std::string(rest), Value::bot()};
    }
  }
  if (head == "inv" || head == "res" || head == "effop" || head == "eff") {
    auto c2 = rest.rfind(',');
    if (c2 == std::string_view::npos) return std::nullopt;
    auto val = parse_value(rest.substr(c2 + 1));
    if (!val) return std::nullopt;
    Event::Kind k = head == "inv"   ? Event::Kind::Inv
                    : head == "res" ? Event::Kind::Res
                                    : Event::Kind::EffOp;
    return Event{k, thread, std::string(rest.substr(0, c2)), *val};
  }
  return std::nullopt;
}

inline Event parse_event(std::string_view s) {
  auto e = try_parse_event(s);
  if (!e) throw ParseError("cannot parse event: " + std::string(s));
  return *e;
}

}  // namespace wmm
