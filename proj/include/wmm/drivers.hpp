#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmm/explore.hpp"
#include "wmm/objects.hpp"

namespace wmm {

struct DriverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace driver_detail {

struct CallChoice {
  std::string op;
  Value arg;
  bool has_arg;
};

inline std::vector<CallChoice> expand_menu(const std::vector<DriverMenuEntry>& menu,
                                           const ValueDomain& inputs) {
  std::vector<CallChoice> r;
  for (const DriverMenuEntry& e : menu) {
    if (e.all_inputs) {
      for (const Value& v : inputs) r.push_back({e.op, v, true});
    } else if (e.arg) {
      r.push_back({e.op, *e.arg, true});
    } else {
      r.push_back({e.op, Value::bot(), false});
    }
  }
  return r;
}

}  // namespace driver_detail

// The deque is owned by one thread: put/take appear on the first thread of a
// driver only (steal may appear anywhere).
inline void validate_driver(const DriverShape& d, const ObjectImpl& impl) {
  for (const auto& menu : d.menus)
    for (const DriverMenuEntry& e : menu)
      if (!impl.ops.count(e.op))
        throw DriverError("driver: '" + impl.id + "' has no operation '" + e.op + "'");
  bool single_owner = impl.id.rfind("chaselev", 0) == 0;
  if (!single_owner) return;
  for (std::size_t t = 1; t < d.menus.size(); ++t)
    for (const DriverMenuEntry& e : d.menus[t])
      if (e.op == "put" || e.op == "take")
        throw DriverError("driver: '" + e.op + "' must stay on the owner thread");
}

// All straight-line client programs the driver shape describes: each thread
// performs `calls` operations, each drawn (with repetition) from its menu.
// Results are bound to registers so that outputs only show up in responses.
inline std::vector<Program> driver_programs(const DriverShape& d,
                                            const ObjectImpl& impl,
                                            const ValueDomain& inputs) {
  validate_driver(d, impl);
  using driver_detail::CallChoice;
  std::vector<std::vector<CallChoice>> menus;
  for (auto& m : d.menus) menus.push_back(driver_detail::expand_menu(m, inputs));

  Program base;
  base.vals = inputs;
  std::vector<Program> out;
  std::vector<std::vector<CallChoice>> picked(menus.size());

  auto emit = [&]() {
    Program p = base;
    p.objects.push_back(d.object);
    for (std::size_t t = 0; t < picked.size(); ++t) {
      Block b;
      int k = 0;
      for (const CallChoice& c : picked[t]) {
        auto s = std::make_shared<Stmt>();
        s->k = Stmt::K::OpCall;
        s->obj = d.object;
        s->op = c.op;
        s->lhs = "r" + std::to_string(k++);
        if (c.has_arg) s->e1 = Expr::constant(c.arg);
        b.stmts.push_back(std::move(s));
      }
      p.threads.push_back(std::move(b));
    }
    out.push_back(std::move(p));
  };

  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (t == menus.size()) {
      emit();
      return;
    }
    auto slots = [&](auto&& self2, int left) -> void {
      if (left == 0) {
        self(self, t + 1);
        return;
      }
      for (const CallChoice& c : menus[t]) {
        picked[t].push_back(c);
        self2(self2, left - 1);
        picked[t].pop_back();
      }
    };
    slots(slots, d.calls);
  };
  rec(rec, 0);
  return out;
}

struct HistorySet {
  std::set<History> histories;
  bool truncated = false;
};

// sem_M(C) within bounds: the prefix-closed history set of the implementation
// under the maximally-permissive drivers of the given shape.  Histories of a
// trace prefix are prefixes of the trace's history, so projecting maximal
// traces and taking history prefixes is enough.
inline HistorySet impl_histories(const ObjectImpl& impl, Model model,
                                 const Bounds& bounds, const DriverShape& d,
                                 const ValueDomain& inputs) {
  HistorySet r;
  for (const Program& p : driver_programs(d, impl, inputs)) {
    engine::Ctx ctx;
    ctx.model = model;
    ctx.prog = &p;
    ctx.bounds = bounds;
    ctx.impls[d.object] = &impl;
    ExploreResult res = engine::run_explore(ctx);
    r.truncated = r.truncated || res.truncated;
    for (const Trace& t : res.maximal) {
      History h = restrict_ir(t);
      History pfx;
      r.histories.insert(pfx);
      for (const Event& e : h.ev) {
        pfx.ev.push_back(e);
        r.histories.insert(pfx);
      }
    }
  }
  return r;
}

}  // namespace wmm
