#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wmm/enforced_order.hpp"
#include "wmm/explore.hpp"

using namespace wmm;

// the two-thread client of the running example: a store-buffered write of x,
// a synchronizing flag z, and three calls on a shared object
static const char* CLIENT = R"(
model: tso
vals: 0, 1
globals: x = 0, z = 0
object o {
  var u = 0;
  var v = 0;
  op A() { u = 1; return 1; }
  op B() { rb = u; }
  op C() { v = 1; }
}
thread {
  x = o.A();
  z = 1;
  o.B();
}
thread {
  await(z=1);
  o.C();
}
)";

static const Path& path_A_returns_1(const std::vector<Path>& paths) {
  for (auto& p : paths)
    for (auto& pe : p.threads[0])
      if (pe.k == PathEvent::K::OpCall && pe.label == "o.A" && pe.out == Value::integer(1))
        return p;
  REQUIRE(false);
  return paths[0];
}

TEST_CASE("enforced orders of the running example, edge for edge") {
  Scenario sc = parse_scenario(CLIENT, library_resolver());
  auto paths = enumerate_paths(sc);
  CHECK(paths.size() == 2);  // A() -> 0 or 1
  const Path& p1 = path_A_returns_1(paths);

  Event effA = effop_ev(0, "o.A", Value::integer(1));
  Event invA = inv_ev(0, "o.A", Value::bot());
  Event resA = res_ev(0, "o.A", Value::integer(1));
  Event stepX = step_ev(0, "x=1"), effX = eff_ev(0, "x=1");
  Event stepZ = step_ev(0, "z=1"), effZ = eff_ev(0, "z=1");
  Event effB = effop_ev(0, "o.B", Value::bot());
  Event invB = inv_ev(0, "o.B", Value::bot());
  Event stepAw = step_ev(1, "await(z=1)"), effAw = eff_ev(1, "await(z=1)");
  Event effC = effop_ev(1, "o.C", Value::bot());

  for (Model m : {Model::SC, Model::TSO, Model::RELAXED}) {
    CAPTURE(static_cast<int>(m));
    PartialOrder po = partial_order(sc.program, m, p1);
    CHECK(po.universe.size() == 15);
    CHECK(po.irreflexive_cycle_free());
    CHECK(audit_axioms(po).ok());

    // all models: issue order, dependencies, synchronization
    CHECK(po.in(invA, effA));
    CHECK(po.in(effA, effX));   // x=rA depends on A's result
    CHECK(po.in(effZ, stepAw)); // await(z=1) reads T1's write
    CHECK(po.in(stepX, effX));

    if (m == Model::SC) {
      CHECK(po.in(effA, resA));  // effects are immediate
      CHECK(po.in(effA, stepX));
      CHECK(po.in(effX, stepZ));
      CHECK(po.in(effZ, invB));
    }
    if (m == Model::TSO) {
      CHECK(po.in(effX, effZ));        // store FIFO
      CHECK(po.in(effA, effZ));
      CHECK_FALSE(po.in(effA, stepX)); // flush may lag the issue
      CHECK_FALSE(po.in(effA, effB));  // program writes cannot pin B's effect
      CHECK_FALSE(po.in(effB, effA));
      CHECK_FALSE(po.in(effX, effB));
      CHECK_FALSE(po.in(effB, effZ));
      CHECK(po.in(invB, effB));
      CHECK_FALSE(po.in(effAw, effC));
      CHECK_FALSE(po.in(effC, effAw));
    }
    if (m == Model::RELAXED) {
      CHECK_FALSE(po.in(effX, effZ));  // no FIFO between distinct variables
      CHECK_FALSE(po.in(effZ, effX));
      CHECK_FALSE(po.in(effA, effZ));
      CHECK_FALSE(po.in(effB, effZ));
    }
  }
}

static bool flags(const AuditReport& r, const std::string& ax) {
  for (auto& v : r.violations)
    if (v.axiom == ax) return true;
  return false;
}

TEST_CASE("audit flags hand-built axiom violations") {
  Event inv = inv_ev(0, "o.A", Value::bot());
  Event res = res_ev(0, "o.A", Value::integer(0));
  Event effo = effop_ev(0, "o.A", Value::integer(0));
  Event invB = inv_ev(1, "o.B", Value::bot());
  Event resB = res_ev(1, "o.B", Value::integer(0));
  Event st = step_ev(2, "x=1");

  SUBCASE("A3: ordering an invocation without its response") {
    PartialOrder po;
    po.add_event(res);
    po.add(inv, st);
    po.close();
    AuditReport r = audit_axioms(po);
    REQUIRE_FALSE(r.ok());
    CHECK(flags(r, "A3"));
  }
  SUBCASE("A4: ordering before a response but not its invocation") {
    PartialOrder po;
    po.add_event(inv);
    po.add(st, res);
    po.close();
    AuditReport r = audit_axioms(po);
    REQUIRE_FALSE(r.ok());
    CHECK(flags(r, "A4"));
  }
  SUBCASE("A5: a program event may not pin an operation's effect") {
    PartialOrder po;
    po.add_event(inv);
    po.add(st, effo);
    po.close();
    AuditReport r = audit_axioms(po);
    REQUIRE_FALSE(r.ok());
    CHECK(flags(r, "A5"));
  }
  SUBCASE("A6: ordered effects require response before invocation") {
    PartialOrder po;
    Event effB = effop_ev(1, "o.B", Value::integer(0));
    po.add_event(res);
    po.add_event(invB);
    po.add_event(resB);
    po.add(effo, effB);
    po.close();
    AuditReport r = audit_axioms(po);
    REQUIRE_FALSE(r.ok());
    CHECK(flags(r, "A6"));
  }
}

TEST_CASE("enforced orders allow every engine trace of the corpus") {
  struct Case {
    const char* name;
    const char* src;
    bool abstract_side;
  };
  std::vector<Case> cases = {
      {"sb_tso", R"(
model: tso
globals: x = 0, y = 0, z = 0, w = 0
thread { x = 1; z = y; }
thread { y = 1; w = x; }
)", false},
      {"fig7_tso", R"(
model: tso
globals: z = 0, y = 0, w = 0
object sl = spinlock
thread { z = 1; }
thread { sl.acquire(); sl.release(); y = z; }
thread { await(z = 1); w = sl.tryAcquire(); }
)", false},
      {"fig7_tso_abs", R"(
model: tso
globals: z = 0, y = 0, w = 0
object sl = spinlock
thread { z = 1; }
thread { sl.acquire(); sl.release(); y = z; }
thread { await(z = 1); w = sl.tryAcquire(); }
)", true},
      {"fig10_arm", R"(
model: arm
globals: y = 0
vals: 0, 1, empty
object d = chaselev.original
thread { d.put(1); }
thread { y = d.steal(); }
)", false},
  };
  for (auto& c : cases) {
    CAPTURE(c.name);
    Scenario sc = parse_scenario(c.src, library_resolver());
    ExploreResult r = c.abstract_side ? spec_traces(sc) : enumerate_traces(sc);
    CHECK_FALSE(r.truncated);
    auto paths = enumerate_paths(sc);
    std::vector<PartialOrder> pos;
    for (auto& p : paths) {
      pos.push_back(partial_order(sc.program, sc.model, p));
      CHECK(audit_axioms(pos.back()).ok());
    }
    long unmatched = 0;
    for (auto& t : r.maximal) {
      bool ok = false;
      for (std::size_t i = 0; i < paths.size() && !ok; ++i)
        ok = path_covers(paths[i], t) && order_allows(pos[i], t);
      if (!ok) ++unmatched;
    }
    CHECK(unmatched == 0);
  }
}
