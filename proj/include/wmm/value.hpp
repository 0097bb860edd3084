#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wmm {

// Bounded operation/program values. Integers plus the no-value element
// (rendered "_") and the symbolic constants used by the deque.
enum class ValKind : std::uint8_t { Int = 0, Bot = 1, Empty = 2, Fail = 3 };

struct Value {
  ValKind kind = ValKind::Bot;
  int num = 0;

  static Value integer(int v) { return Value{ValKind::Int, v}; }
  static Value bot() { return Value{ValKind::Bot, 0}; }
  static Value empty() { return Value{ValKind::Empty, 0}; }
  static Value fail() { return Value{ValKind::Fail, 0}; }

  bool is_int() const { return kind == ValKind::Int; }
  bool is_bot() const { return kind == ValKind::Bot; }
  bool truthy() const { return kind == ValKind::Int && num != 0; }

  friend auto operator<=>(const Value&, const Value&) = default;
};

inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case ValKind::Int: return std::to_string(v.num);
    case ValKind::Bot: return "_";
    case ValKind::Empty: return "empty";
    case ValKind::Fail: return "fail";
  }
  return "?";
}

inline std::optional<Value> parse_value(std::string_view s) {
  if (s == "_") return Value::bot();
  if (s == "empty") return Value::empty();
  if (s == "fail") return Value::fail();
  if (s.empty()) return std::nullopt;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return std::nullopt;
  return Value::integer(std::stoi(std::string(s)));
}

// The finite per-scenario value domain (default {0,1}).
using ValueDomain = std::vector<Value>;

inline ValueDomain default_domain() {
  return {Value::integer(0), Value::integer(1)};
}

}  // namespace wmm
