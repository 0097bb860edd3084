#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "wmm/event.hpp"

namespace wmm {

// A trace is a finite, duplicate-free sequence of events whose responses,
// operation effects and program-step effects are all preceded by their
// matching invocation/step, and where a response and an operation effect of
// the same call carry the same output.
using Events = std::vector<Event>;

struct Trace {
  Events ev;

  bool operator==(const Trace& o) const = default;
  auto operator<=>(const Trace& o) const = default;
  std::size_t size() const { return ev.size(); }
  bool empty() const { return ev.empty(); }
};

using History = Trace;  // invocation/response events only

// Key identifying an operation call (inv/res/effop share it) or a program
// step (step/eff share it).
struct EventKey {
  ThreadId thread;
  std::string label;
  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

inline EventKey key_of(const Event& e) { return EventKey{e.thread, e.label}; }

enum class TraceError {
  DuplicateEvent,
  ResponseBeforeInvocation,
  EffectBeforeStep,
  OutputMismatch,
  DuplicateRole,  // two responses / two invocations / two steps for one key
};

struct TraceViolation {
  TraceError error;
  std::size_t index;  // offending position
};

inline std::variant<Trace, TraceViolation> validate_trace(Events events) {
  std::set<Event> seen;
  std::map<EventKey, Value> inv_seen, res_seen, eff_seen;
  std::set<EventKey> step_seen, effp_seen;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!seen.insert(e).second)
      return TraceViolation{TraceError::DuplicateEvent, i};
    EventKey k = key_of(e);
    switch (e.kind) {
      case Event::Kind::Step:
        if (!step_seen.insert(k).second)
          return TraceViolation{TraceError::DuplicateRole, i};
        break;
      case Event::Kind::Eff:
        if (!step_seen.count(k))
          return TraceViolation{TraceError::EffectBeforeStep, i};
        if (!effp_seen.insert(k).second)
          return TraceViolation{TraceError::DuplicateRole, i};
        break;
      case Event::Kind::Inv:
        if (!inv_seen.emplace(k, e.value).second)
          return TraceViolation{TraceError::DuplicateRole, i};
        break;
      case Event::Kind::Res:
        if (!inv_seen.count(k))
          return TraceViolation{TraceError::ResponseBeforeInvocation, i};
        if (res_seen.count(k))
          return TraceViolation{TraceError::DuplicateRole, i};
        if (eff_seen.count(k) && eff_seen[k] != e.value)
          return TraceViolation{TraceError::OutputMismatch, i};
        res_seen.emplace(k, e.value);
        break;
      case Event::Kind::EffOp:
        if (!inv_seen.count(k))
          return TraceViolation{TraceError::ResponseBeforeInvocation, i};
        if (eff_seen.count(k))
          return TraceViolation{TraceError::DuplicateRole, i};
        if (res_seen.count(k) && res_seen[k] != e.value)
          return TraceViolation{TraceError::OutputMismatch, i};
        eff_seen.emplace(k, e.value);
        break;
    }
  }
  return Trace{std::move(events)};
}

inline bool is_valid_trace(const Events& events) {
  return std::holds_alternative<Trace>(validate_trace(events));
}

// --- restrictions ----------------------------------------------------------

// t|ir : invocation and response events only.
inline History restrict_ir(const Trace& t) {
  History h;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Inv || e.kind == Event::Kind::Res)
      h.ev.push_back(e);
  return h;
}

// Program events only.
inline Trace restrict_prog(const Trace& t) {
  Trace r;
  for (const Event& e : t.ev)
    if (e.is_prog()) r.ev.push_back(e);
  return r;
}

// All object events (inv/res/effop).
inline Trace restrict_obj(const Trace& t) {
  Trace r;
  for (const Event& e : t.ev)
    if (e.is_obj()) r.ev.push_back(e);
  return r;
}

// Observable behaviour: effects of program steps that write a global.
inline Events obs(const Trace& t) {
  Events o;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Eff && e.writes_global()) o.push_back(e);
  return o;
}

// Replay the write effects over the initial global values.
inline std::map<std::string, Value> final_globals(
    const Trace& t, std::map<std::string, Value> init) {
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Eff && e.writes_global())
      if (auto v = e.written_value()) init[e.written_global()] = *v;
  return init;
}

// --- pending calls, extensions, completion ---------------------------------

inline std::vector<Event> pending_invocations(const Trace& t) {
  std::set<EventKey> responded;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Res) responded.insert(key_of(e));
  std::vector<Event> pend;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Inv && !responded.count(key_of(e)))
      pend.push_back(e);
  return pend;
}

inline std::optional<Value> effect_value(const Trace& t, const EventKey& k) {
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::EffOp && key_of(e) == k) return e.value;
  return std::nullopt;
}

// ext(t): every extension of t by appended response events (subsets of the
// pending invocations, all interleavings, all domain outputs; outputs are
// forced when the call already took effect).  `max_added` caps how many
// responses are appended.
inline std::vector<Trace> ext(const Trace& t, const ValueDomain& domain,
                              std::size_t max_added = SIZE_MAX) {
  std::vector<Event> pend = pending_invocations(t);
  ValueDomain outs = domain;
  if (std::find(outs.begin(), outs.end(), Value::bot()) == outs.end())
    outs.push_back(Value::bot());

  std::vector<Trace> result;
  std::set<Trace> seen;
  // DFS over choices: at each step, append a response for one still-pending
  // call (or stop).
  struct Rec {
    const ValueDomain& outs;
    std::size_t cap;
    std::vector<Trace>& result;
    std::set<Trace>& seen;
    void go(const Trace& cur, std::vector<Event> pend, std::size_t added) {
      if (seen.insert(cur).second) result.push_back(cur);
      if (added >= cap) return;
      for (std::size_t i = 0; i < pend.size(); ++i) {
        EventKey k = key_of(pend[i]);
        std::vector<Value> vals;
        if (auto forced = effect_value(cur, k))
          vals.push_back(*forced);
        else
          vals.assign(outs.begin(), outs.end());
        std::vector<Event> rest = pend;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        for (const Value& v : vals) {
          Trace next = cur;
          next.ev.push_back(res_ev(pend[i].thread, pend[i].label, v));
          go(next, rest, added + 1);
        }
      }
    }
  } rec{outs, max_added, result, seen};
  rec.go(t, pend, 0);
  return result;
}

// The canonical extension used by the soundness construction: append
// responses for exactly those pending invocations whose operation effect
// occurs in t, carrying the effect's output.
inline Trace ext_matching(const Trace& t) {
  Trace r = t;
  for (const Event& inv : pending_invocations(t))
    if (auto v = effect_value(t, key_of(inv)))
      r.ev.push_back(res_ev(inv.thread, inv.label, *v));
  return r;
}

// comp(t): drop invocations that have neither a response nor an operation
// effect anywhere in t (head-recursive formulation).
inline Trace comp(const Trace& t) {
  std::set<EventKey> answered;
  for (const Event& e : t.ev)
    if (e.kind == Event::Kind::Res || e.kind == Event::Kind::EffOp)
      answered.insert(key_of(e));
  Trace r;
  for (const Event& e : t.ev) {
    if (e.kind == Event::Kind::Inv && !answered.count(key_of(e))) continue;
    r.ev.push_back(e);
  }
  return r;
}

// --- equivalence and precedence --------------------------------------------

// h ~ h': each thread performs the same sequence of invocations and
// responses in both.
inline bool thread_equivalent(const History& a, const History& b) {
  std::map<ThreadId, Events> pa, pb;
  for (const Event& e : a.ev)
    if (e.kind == Event::Kind::Inv || e.kind == Event::Kind::Res)
      pa[e.thread].push_back(e);
  for (const Event& e : b.ev)
    if (e.kind == Event::Kind::Inv || e.kind == Event::Kind::Res)
      pb[e.thread].push_back(e);
  return pa == pb;
}

// Precedence order of a trace: response-before-invocation pairs of distinct
// calls.
inline std::set<std::pair<Event, Event>> precedence(const Trace& t) {
  std::set<std::pair<Event, Event>> r;
  for (std::size_t i = 0; i < t.ev.size(); ++i) {
    if (t.ev[i].kind != Event::Kind::Res) continue;
    for (std::size_t j = i + 1; j < t.ev.size(); ++j) {
      if (t.ev[j].kind != Event::Kind::Inv) continue;
      if (key_of(t.ev[i]) == key_of(t.ev[j])) continue;
      r.emplace(t.ev[i], t.ev[j]);
    }
  }
  return r;
}

inline bool precedence_subset(const Trace& stricter, const Trace& looser) {
  auto a = precedence(stricter);
  auto b = precedence(looser);
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// --- rendering --------------------------------------------------------------

inline std::vector<std::string> render_trace(const Trace& t) {
  std::vector<std::string> out;
  out.reserve(t.ev.size());
  for (const Event& e : t.ev) out.push_back(render_event(e));
  return out;
}

inline Trace parse_trace(const std::vector<std::string>& lines) {
  Events ev;
  for (const auto& s : lines) ev.push_back(parse_event(s));
  auto v = validate_trace(std::move(ev));
  if (auto* viol = std::get_if<TraceViolation>(&v))
    throw ParseError("invalid trace at event " + std::to_string(viol->index));
  return std::get<Trace>(std::move(v));
}

}  // namespace wmm
