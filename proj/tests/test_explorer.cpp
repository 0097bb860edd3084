#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "wmm/explore.hpp"

using namespace wmm;

static Scenario load(const std::string& rel) {
  for (const char* base : {"scenarios/", "../scenarios/", "../../scenarios/"}) {
    std::ifstream f(base + rel);
    if (!f) continue;
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), library_resolver());
  }
  FAIL("cannot find scenario " << rel);
  return {};
}

static bool has_effs(const Trace& t, const std::vector<std::string>& labels) {
  std::size_t found = 0;
  for (auto& l : labels)
    for (auto& e : t.ev)
      if (e.kind == Event::Kind::Eff && e.label == l) { ++found; break; }
  return found == labels.size();
}

static bool some_trace_with_effs(const std::vector<Trace>& ts,
                                 const std::vector<std::string>& labels) {
  for (auto& t : ts)
    if (has_effs(t, labels)) return true;
  return false;
}

TEST_CASE("store buffering: both-stale outcome is TSO-only") {
  Scenario tso = load("sb_tso.scn");
  auto r = enumerate_traces(tso);
  CHECK_FALSE(r.truncated);
  CHECK(some_trace_with_effs(r.maximal, {"z=0", "w=0"}));
  for (const Trace& t : r.maximal)
    CHECK(std::holds_alternative<Trace>(validate_trace(t.ev)));

  Scenario sc = load("sb_sc.scn");
  auto rs = enumerate_traces(sc);
  CHECK_FALSE(rs.truncated);
  CHECK_FALSE(some_trace_with_effs(rs.maximal, {"z=0", "w=0"}));
}

TEST_CASE("store buffering through registers: spec traces exclude the weak outcome") {
  Scenario sc = load("sb_register_tso.scn");
  auto impl = enumerate_traces(sc);
  CHECK(some_trace_with_effs(impl.maximal, {"z=0", "w=0"}));
  auto spec = spec_traces(sc);
  CHECK_FALSE(spec.truncated);
  CHECK_FALSE(some_trace_with_effs(spec.maximal, {"z=0", "w=0"}));
}

TEST_CASE("spinlock client on TSO reaches the triangular-race trace") {
  Scenario sc = load("spinlock_tso_triangular.scn");
  auto r = enumerate_traces(sc);
  CHECK_FALSE(r.truncated);
  Trace g = parse_trace({
      "inv(T2,sl.acquire,_)", "res(T2,sl.acquire,_)", "effop(T2,sl.acquire,_)",
      "inv(T2,sl.release,_)", "res(T2,sl.release,_)", "step(T2,\"y=0\")",
      "step(T1,\"z=1\")", "eff(T1,\"z=1\")",
      "step(T3,\"await(z=1)\")", "eff(T3,\"await(z=1)\")",
      "inv(T3,sl.tryAcquire,_)", "res(T3,sl.tryAcquire,0)", "effop(T3,sl.tryAcquire,0)",
      "step(T3,\"w=0\")", "eff(T3,\"w=0\")",
      "effop(T2,sl.release,_)", "eff(T2,\"y=0\")"});
  CHECK(r.contains(g));
  for (const Trace& t : r.maximal)
    CHECK(std::holds_alternative<Trace>(validate_trace(t.ev)));
}

TEST_CASE("chaselev trilogy: weak steal observation under the relaxed model") {
  auto orig = concrete_obs(load("chaselev_original_relaxed.scn"));
  auto fixed = concrete_obs(load("chaselev_cfence_relaxed.scn"));
  CHECK_FALSE(orig.truncated);
  CHECK_FALSE(fixed.truncated);
  auto has_y0 = [](const std::set<Trace>& obs) {
    for (const Trace& t : obs)
      for (const Event& e : t.ev)
        if (e.kind == Event::Kind::Eff && e.label == "y=0") return true;
    return false;
  };
  CHECK(has_y0(orig.projected));
  CHECK_FALSE(has_y0(fixed.projected));
}

TEST_CASE("projections agree with full exploration") {
  Scenario sc = load("sb_tso.scn");
  auto full = enumerate_traces(sc);
  auto proj = concrete_obs(sc);
  std::set<Trace> want;
  for (const Trace& t : full.maximal) want.insert(Trace{obs(t)});
  CHECK(proj.projected == want);
}
