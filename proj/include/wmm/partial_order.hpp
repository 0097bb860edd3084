#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wmm/trace.hpp"

namespace wmm {

// An enforced order over the event universe of a program under a memory
// model.  Stored irreflexively; reflexive pairs are implicit.  The universe
// contains one invocation per call and a response/operation-effect variant
// per possible output value.
struct PartialOrder {
  std::vector<Event> universe;
  std::set<std::pair<int, int>> rel;  // indices into universe

  std::map<Event, int> index;

  int idx(const Event& e) const {
    auto it = index.find(e);
    return it == index.end() ? -1 : it->second;
  }

  void add_event(const Event& e) {
    if (index.count(e)) return;
    index.emplace(e, static_cast<int>(universe.size()));
    universe.push_back(e);
  }

  void add(const Event& a, const Event& b) {
    add_event(a);
    add_event(b);
    if (a != b) rel.emplace(idx(a), idx(b));
  }

  // Transitive closure (universes are small).
  void close() {
    std::size_t n = universe.size();
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (auto& [a, b] : rel) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (m[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (m[k][j]) m[i][j] = true;
    rel.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i][j] && i != j) rel.emplace(static_cast<int>(i), static_cast<int>(j));
  }

  // Reflexive containment.
  bool in(const Event& a, const Event& b) const {
    if (a == b) return true;
    int i = idx(a), j = idx(b);
    if (i < 0 || j < 0) return false;
    return rel.count({i, j}) > 0;
  }

  bool irreflexive_cycle_free() const {
    for (auto& [a, b] : rel)
      if (rel.count({b, a})) return false;
    return true;
  }
};

// po allows t: for every enforced pair (a,b), if b occurs in t then a occurs
// earlier in t.  (A plain subset test is not suitable: the order also rules
// in traces that omit b entirely.)
inline bool order_allows(const PartialOrder& po, const Trace& t) {
  std::map<Event, std::size_t> pos;
  for (std::size_t i = 0; i < t.ev.size(); ++i) pos.emplace(t.ev[i], i);
  for (auto& [ia, ib] : po.rel) {
    const Event& a = po.universe[static_cast<std::size_t>(ia)];
    const Event& b = po.universe[static_cast<std::size_t>(ib)];
    auto itb = pos.find(b);
    if (itb == pos.end()) continue;
    auto ita = pos.find(a);
    if (ita == pos.end() || ita->second >= itb->second) return false;
  }
  return true;
}

// --- axiom audit -------------------------------------------------------------

struct AuditViolation {
  std::string axiom;  // "A3".."A6", "L1"
  Event a, b;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

struct OpGroup {
  EventKey key;
  std::vector<Event> invs, ress, effs;
  std::vector<Event> all() const {
    std::vector<Event> r = invs;
    r.insert(r.end(), ress.begin(), ress.end());
    r.insert(r.end(), effs.begin(), effs.end());
    return r;
  }
};

inline std::map<EventKey, OpGroup> op_groups(const PartialOrder& po) {
  std::map<EventKey, OpGroup> g;
  for (const Event& e : po.universe) {
    if (!e.is_obj()) continue;
    OpGroup& og = g[key_of(e)];
    og.key = key_of(e);
    if (e.kind == Event::Kind::Inv) og.invs.push_back(e);
    if (e.kind == Event::Kind::Res) og.ress.push_back(e);
    if (e.kind == Event::Kind::EffOp) og.effs.push_back(e);
  }
  return g;
}

}  // namespace detail

// Audits the operation-event axioms of an enforced order, plus the derived
// cross-operation property: any ordering between events of distinct calls
// implies their response precedes the other's invocation.
inline AuditReport audit_axioms(const PartialOrder& po) {
  AuditReport rep;
  auto groups = detail::op_groups(po);

  for (auto& [k, g] : groups) {
    for (const Event& inv : g.invs) {
      for (const Event& res : g.ress) {
        // A3: inv before e iff res before e, for e other than the call's
        // own invocation and effect.
        for (const Event& e : po.universe) {
          if (e.is_obj() && key_of(e) == k) continue;
          bool li = po.in(inv, e), lr = po.in(res, e);
          if (li != lr)
            rep.violations.push_back({"A3", inv, e,
                                      "inv-before and res-before disagree for " + render_event(res)});
        }
        // A4: e before res iff e before inv, for e other than the call's
        // own response and effect.
        for (const Event& e : po.universe) {
          if (e.is_obj() && key_of(e) == k) continue;
          bool lr = po.in(e, res), li = po.in(e, inv);
          if (lr != li)
            rep.violations.push_back({"A4", e, res,
                                      "before-res and before-inv disagree for " + render_event(inv)});
        }
      }
      // A5: a program event precedes the call's effect iff it precedes the
      // invocation.
      for (const Event& eff : g.effs) {
        for (const Event& e : po.universe) {
          if (!e.is_prog()) continue;
          bool le = po.in(e, eff), li = po.in(e, inv);
          if (le != li)
            rep.violations.push_back({"A5", e, eff,
                                      "prog event ordering with effect disagrees with invocation"});
        }
      }
    }
  }

  // A6 and the derived cross-call property.
  for (auto& [ka, ga] : groups) {
    for (auto& [kb, gb] : groups) {
      if (ka == kb) continue;
      auto concl = [&]() {
        for (const Event& res : ga.ress)
          for (const Event& inv : gb.invs)
            if (!po.in(res, inv)) return false;
        return !ga.ress.empty() && !gb.invs.empty();
      };
      for (const Event& ea : ga.all()) {
        for (const Event& effb : gb.effs) {
          if (po.in(ea, effb) && !concl())
            rep.violations.push_back({"A6", ea, effb,
                                      "cross-call effect ordering without response-before-invocation"});
        }
        for (const Event& eb : gb.all()) {
          if (po.in(ea, eb) && !concl())
            rep.violations.push_back({"L1", ea, eb,
                                      "cross-call ordering without response-before-invocation"});
        }
      }
    }
  }
  return rep;
}

}  // namespace wmm
