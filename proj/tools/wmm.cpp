// Scenario runner: batch checking of weak-memory refinement and
// linearizability scenarios, plus a few inspection subcommands.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wmm/checkers.hpp"
#include "wmm/enforced_order.hpp"
#include "wmm/strongest.hpp"

using nlohmann::json;
using namespace wmm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string s;
  for (auto& x : v) {
    if (!s.empty()) s += sep;
    s += x;
  }
  return s;
}

json bounds_json(const Bounds& b) {
  return json{{"max_len", b.max_len}, {"unroll", b.unroll}, {"window", b.window},
              {"calls", b.calls}};
}

std::string default_object(const Scenario& sc) {
  if (sc.driver) return sc.driver->object;
  if (!sc.program.objects.empty()) return sc.program.objects.front();
  return "";
}

// axiom audit over the enforced orders of every path, under all three models
AuditReport audit_scenario(const Scenario& sc) {
  AuditReport all;
  for (Model m : {Model::SC, Model::TSO, Model::RELAXED}) {
    for (const Path& p : enumerate_paths(sc)) {
      AuditReport r = audit_axioms(partial_order(sc.program, m, p));
      for (auto& v : r.violations) all.violations.push_back(v);
    }
  }
  return all;
}

struct CheckerRun {
  std::string checker, verdict;
  json detail;
};

CheckerRun run_checker(const Scenario& sc, const std::string& checker) {
  CheckerRun out;
  out.checker = checker;
  if (checker == "refine") {
    RefinementVerdict v = check_trace_refinement(sc);
    out.verdict = to_string(v.verdict);
    if (v.verdict == Verdict::Fail) {
      out.detail["counterexample"] = render_trace(v.counterexample);
      out.detail["counterexample_obs"] = render_trace(Trace{v.counterexample_obs});
    }
    out.detail["concrete_obs"] = v.concrete_obs.size();
    out.detail["abstract_obs"] = v.abstract_obs.size();
  } else if (checker == "lin") {
    LinVerdict v = check_scenario_linearizability(sc, default_object(sc));
    out.verdict = to_string(v.verdict);
    if (v.verdict == Verdict::Fail)
      out.detail["failing_history"] = render_trace(v.failing);
    else
      out.detail["histories"] = v.witnesses.size();
    if (v.bound_exceeded) out.detail["bound_exceeded"] = true;
  } else if (checker == "axioms") {
    AuditReport r = audit_scenario(sc);
    out.verdict = r.ok() ? "pass" : "fail";
    for (auto& v : r.violations)
      out.detail["violations"].push_back(v.axiom + ": " + render_event(v.a) +
                                         " -> " + render_event(v.b));
  } else {
    throw ParseError("unknown checker '" + checker + "'");
  }
  return out;
}

struct Options {
  bool json_out = false;
  bool strict = false;
  std::string model;  // override
  int max_len = 0;    // override when > 0
  int seed = 0;       // reserved for the randomized test suites
};

Scenario load(const std::string& path, const Options& opt) {
  Scenario sc = parse_scenario(slurp(path), library_resolver());
  if (sc.name.empty())
    sc.name = std::filesystem::path(path).stem().string();
  if (!opt.model.empty()) {
    auto m = parse_model(opt.model);
    if (!m) throw ParseError("unknown model '" + opt.model + "'");
    sc.model = *m;
  }
  if (opt.max_len > 0) sc.bounds.max_len = opt.max_len;
  sc.bounds.strict = opt.strict;
  return sc;
}

int run_files(const std::vector<std::string>& files, const Options& opt,
              const std::string& only_checker) {
  bool mismatch = false, inconclusive = false;
  json report = json::array();
  for (const std::string& f : files) {
    Scenario sc = load(f, opt);
    std::vector<std::string> checkers;
    if (!only_checker.empty())
      checkers.push_back(only_checker);
    else
      for (auto& [c, v] : sc.expects) checkers.push_back(c);
    if (checkers.empty()) checkers.push_back("axioms");
    for (const std::string& c : checkers) {
      auto t0 = std::chrono::steady_clock::now();
      CheckerRun r = run_checker(sc, c);
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      std::string expected;
      for (auto& [ec, ev] : sc.expects)
        if (ec == c) expected = ev;
      bool matched = expected.empty() || expected == r.verdict;
      if (!matched) mismatch = true;
      if (r.verdict == "inconclusive") inconclusive = true;
      json entry{{"scenario", sc.name},
                 {"checker", c},
                 {"verdict", r.verdict},
                 {"bounds", bounds_json(sc.bounds)},
                 {"elapsed_ms", ms}};
      if (!r.detail.is_null()) entry["detail"] = r.detail;
      if (!expected.empty()) entry["expected"] = expected;
      report.push_back(entry);
      if (!opt.json_out)
        std::cout << sc.name << ": " << c << " = " << r.verdict
                  << (expected.empty() ? "" : matched ? "  (expected)" : "  (MISMATCH, expected " + expected + ")")
                  << "  [" << ms << " ms]\n";
    }
  }
  if (opt.json_out) std::cout << report.dump(2) << "\n";
  if (mismatch) return 1;
  if (inconclusive && opt.strict) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicit-state checker for concurrent objects under weak memory"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--json", opt.json_out, "emit JSON reports");
  app.add_flag("--strict", opt.strict, "exit 3 when a verdict is inconclusive");
  app.add_option("--model", opt.model, "override the scenario's memory model (sc|tso|relaxed)");
  app.add_option("--bounds.max-len", opt.max_len, "override the trace length bound");
  app.add_option("--seed", opt.seed, "seed for randomized suites (accepted for interface parity)");

  std::vector<std::string> files;
  std::string checker, object, impl_id, model_arg;
  bool all = false;

  auto* run = app.add_subcommand("run", "run the checkers a scenario expects");
  run->add_option("files", files, "scenario files");
  run->add_flag("--all", all, "run every scenario under scenarios/");
  run->add_option("--checker", checker, "run one checker (refine|lin|axioms)");

  auto* enumerate = app.add_subcommand("enumerate", "print maximal traces");
  enumerate->add_option("files", files, "scenario file")->required();

  auto* check_lin = app.add_subcommand("check-lin", "linearizability of the induced histories");
  check_lin->add_option("files", files, "scenario file")->required();
  check_lin->add_option("--object", object, "object to check (default: first bound object)");

  auto* check_refine = app.add_subcommand("check-refine", "weak-memory trace refinement");
  check_refine->add_option("files", files, "scenario file")->required();

  auto* axioms = app.add_subcommand("axioms", "audit the enforced orders against the order axioms");
  axioms->add_option("files", files, "scenario file")->required();

  auto* strongest = app.add_subcommand("strongest-client", "generate the strongest client of a history");
  strongest->add_option("files", files, "history file, one canonical event per line")->required();
  strongest->add_option("--object", object, "object name")->required();
  strongest->add_option("--impl", impl_id, "implementation library id")->required();

  auto* list = app.add_subcommand("list-objects", "list library implementations and specs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (auto& [id, o] : object_library()) std::cout << id << "\n";
      for (auto& id : spec_ids()) std::cout << id << "\n";
      return 0;
    }
    if (run->parsed()) {
      if (all)
        for (auto& e : std::filesystem::directory_iterator("scenarios"))
          if (e.path().extension() == ".scn") files.push_back(e.path().string());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw ParseError("no scenario files given");
      return run_files(files, opt, checker);
    }
    if (enumerate->parsed()) {
      Scenario sc = load(files[0], opt);
      ExploreResult r = enumerate_traces(sc);
      if (opt.json_out) {
        json out{{"scenario", sc.name}, {"truncated", r.truncated}, {"traces", json::array()}};
        for (const Trace& t : r.maximal) out["traces"].push_back(render_trace(t));
        std::cout << out.dump(2) << "\n";
      } else {
        for (const Trace& t : r.maximal) std::cout << join(render_trace(t)) << "\n";
        if (r.truncated) std::cout << "(truncated)\n";
      }
      return r.truncated && opt.strict ? 3 : 0;
    }
    if (check_lin->parsed() || check_refine->parsed() || axioms->parsed()) {
      std::string c = check_lin->parsed() ? "lin" : check_refine->parsed() ? "refine" : "axioms";
      Options o = opt;
      Scenario sc = load(files[0], o);
      if (!object.empty() && c == "lin") {
        // check a specific object rather than the default
        sc.program.objects.insert(sc.program.objects.begin(), object);
      }
      auto t0 = std::chrono::steady_clock::now();
      CheckerRun r = run_checker(sc, c);
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      json entry{{"scenario", sc.name}, {"checker", c}, {"verdict", r.verdict},
                 {"bounds", bounds_json(sc.bounds)}, {"elapsed_ms", ms}};
      if (!r.detail.is_null()) entry["detail"] = r.detail;
      if (opt.json_out)
        std::cout << entry.dump(2) << "\n";
      else
        std::cout << sc.name << ": " << c << " = " << r.verdict << "\n";
      if (r.verdict == "inconclusive" && opt.strict) return 3;
      return 0;
    }
    if (strongest->parsed()) {
      std::ifstream in(files[0]);
      if (!in) throw ParseError("cannot open " + files[0]);
      std::vector<std::string> lines;
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
      History h = parse_trace(lines);
      const ObjectImpl* im = find_impl(impl_id);
      if (!im) throw ParseError("unknown implementation '" + impl_id + "'");
      Model m = Model::TSO;
      if (!opt.model.empty()) {
        auto pm = parse_model(opt.model);
        if (!pm) throw ParseError("unknown model '" + opt.model + "'");
        m = *pm;
      }
      StrongestResult r = strongest_client(h, object, *im, m, Bounds{});
      Scenario sc;
      sc.model = m;
      sc.program = r.program;
      sc.impl_ids[object] = impl_id;
      if (!r.constructible) std::cout << "// inconstructible: no strongest client\n";
      std::cout << render_scenario(sc);
      return r.constructible ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
