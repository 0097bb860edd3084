#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wmm/program.hpp"
#include "wmm/trace.hpp"

namespace wmm {

// --- atomic specifications ----------------------------------------------------

// Specification state is a value vector interpreted by the spec itself
// (register: cell; lock: flag; deque: queue contents).
using SpecState = std::vector<Value>;

struct ObjectSpec {
  using Successors = std::vector<std::pair<SpecState, Value>>;
  using Trans = std::function<Successors(const SpecState&, const Value&)>;

  std::string id;
  SpecState init;
  std::map<std::string, Trans> ops;
  std::map<std::string, bool> has_arg;

  // Blocked calls (e.g. acquire on a taken lock) yield no successors.
  Successors step(const std::string& op, const SpecState& s, const Value& in) const {
    auto it = ops.find(op);
    if (it == ops.end()) return {};
    return it->second(s, in);
  }
};

inline ObjectSpec register_spec() {
  ObjectSpec sp;
  sp.id = "register.spec";
  sp.init = {Value::integer(0)};
  sp.has_arg = {{"write", true}, {"read", false}};
  sp.ops["write"] = [](const SpecState&, const Value& in) {
    return ObjectSpec::Successors{{{in}, Value::bot()}};
  };
  sp.ops["read"] = [](const SpecState& s, const Value&) {
    return ObjectSpec::Successors{{s, s[0]}};
  };
  return sp;
}

inline ObjectSpec spinlock_spec() {
  ObjectSpec sp;
  sp.id = "spinlock.spec";
  sp.init = {Value::integer(1)};
  sp.has_arg = {{"acquire", false}, {"release", false}, {"tryAcquire", false}};
  sp.ops["acquire"] = [](const SpecState& s, const Value&) {
    ObjectSpec::Successors r;
    if (s[0] == Value::integer(1)) r.push_back({{Value::integer(0)}, Value::bot()});
    return r;  // blocked while the lock is taken
  };
  sp.ops["release"] = [](const SpecState&, const Value&) {
    return ObjectSpec::Successors{{{Value::integer(1)}, Value::bot()}};
  };
  sp.ops["tryAcquire"] = [](const SpecState& s, const Value&) {
    ObjectSpec::Successors r;
    if (s[0] == Value::integer(1))
      r.push_back({{Value::integer(0)}, Value::integer(1)});
    else
      r.push_back({s, Value::integer(0)});
    return r;
  };
  return sp;
}

inline ObjectSpec chaselev_spec() {
  ObjectSpec sp;
  sp.id = "chaselev.spec";
  sp.init = {};  // queue contents, oldest first
  sp.has_arg = {{"put", true}, {"take", false}, {"steal", false}};
  sp.ops["put"] = [](const SpecState& s, const Value& in) {
    SpecState t = s;
    t.push_back(in);
    return ObjectSpec::Successors{{t, Value::bot()}};
  };
  // take removes from the owner's end: capture the last element, then shrink.
  sp.ops["take"] = [](const SpecState& s, const Value&) {
    if (s.empty()) return ObjectSpec::Successors{{s, Value::empty()}};
    SpecState t(s.begin(), s.end() - 1);
    return ObjectSpec::Successors{{t, s.back()}};
  };
  // steal removes from the front, or may spuriously fail under contention.
  sp.ops["steal"] = [](const SpecState& s, const Value&) {
    if (s.empty()) return ObjectSpec::Successors{{s, Value::empty()}};
    SpecState t(s.begin() + 1, s.end());
    return ObjectSpec::Successors{{t, s.front()}, {s, Value::fail()}};
  };
  return sp;
}

inline const ObjectSpec* find_spec(const std::string& id) {
  static const std::map<std::string, ObjectSpec> specs = [] {
    std::map<std::string, ObjectSpec> m;
    for (auto& sp : {register_spec(), spinlock_spec(), chaselev_spec()}) m[sp.id] = sp;
    return m;
  }();
  auto it = specs.find(id);
  return it == specs.end() ? nullptr : &it->second;
}

// --- built-in implementations ---------------------------------------------------

namespace objects_detail {

inline ObjectImpl parse_impl(const std::string& id, const std::string& body) {
  Scenario sc = parse_scenario("object o " + body);
  ObjectImpl o = sc.impls.at("o");
  o.id = id;
  return o;
}

inline std::map<std::string, ObjectImpl> build_library() {
  std::map<std::string, ObjectImpl> lib;

  // Unfenced register: the write lingers in the store buffer / commit pool.
  lib["register"] = parse_impl("register", R"({
    var x = 0;
    op write(v) { x = v; return; }
    op read() { r = x; return r; }
  })");

  // Fenced register: the write is globally visible before the response.
  lib["register.fenced"] = parse_impl("register.fenced", R"({
    var x = 0;
    op write(v) { x = v; fence; return; }
    op read() { r = x; return r; }
  })");

  // Test-and-set spinlock; x=1 means free.  TAS carries a built-in fence.
  const std::string spinlock_body = R"({
    var x = 1;
    op acquire() {
      r = TAS(x, 1, 0);
      while (r = 0) {
        await(x = 1);
        r = TAS(x, 1, 0);
      }
      return;
    }
    op release() { x = 1; return; }
    op tryAcquire() { r = TAS(x, 1, 0); return r; }
  })";
  lib["spinlock"] = parse_impl("spinlock", spinlock_body);
  {
    ObjectImpl o = parse_impl("spinlock.no_tryacquire", spinlock_body);
    o.ops.erase("tryAcquire");
    lib["spinlock.no_tryacquire"] = o;
  }

  // Chase-Lev work-stealing deque over a circular buffer of length 4.
  // Owner thread runs put/take; other threads steal.
  auto chaselev = [](const std::string& steal_body, bool fenced_put) {
    std::string put_tail = fenced_put ? "fence; return;" : "return;";
    return R"({
    var head = 0;
    var tail = 0;
    var tasks[4] = 0;
    op put(v) {
      t = tail;
      tasks[t mod 4] = v;
      fence;
      tail = t + 1;
      )" + put_tail + R"(
    }
    op take() {
      t = tail - 1;
      tail = t;
      fence;
      h = head;
      if (h <= t) {
        task = tasks[t mod 4];
        if (h = t) {
          rc = CAS(head, h, h + 1);
          if (rc = 0) { task = empty; }
          tail = tail + 1;
        }
      } else {
        task = empty;
        tail = tail + 1;
      }
      return task;
    }
    op steal() )" + steal_body + R"(
  })";
  };

  // Original: the second control fence sits after the load into task, so the
  // load may take effect before the surrounding branch.
  const std::string steal_original = R"({
      h = head;
      fence;
      t = tail;
      cfence;
      if (h < t) {
        task = tasks[h mod 4];
        cfence;
        rc = CAS(head, h, h + 1);
        if (rc = 0) { task = fail; }
      } else {
        task = empty;
      }
      return task;
    })";

  // Repaired: the control fence is moved before the load into task.
  const std::string steal_fixed = R"({
      h = head;
      fence;
      t = tail;
      cfence;
      if (h < t) {
        cfence;
        task = tasks[h mod 4];
        rc = CAS(head, h, h + 1);
        if (rc = 0) { task = fail; }
      } else {
        task = empty;
      }
      return task;
    })";

  lib["chaselev.original"] = parse_impl("chaselev.original", chaselev(steal_original, false));
  lib["chaselev.cfence_fixed"] = parse_impl("chaselev.cfence_fixed", chaselev(steal_fixed, false));
  lib["chaselev.put_fenced"] = parse_impl("chaselev.put_fenced", chaselev(steal_fixed, true));
  return lib;
}

}  // namespace objects_detail

inline const std::map<std::string, ObjectImpl>& object_library() {
  static const std::map<std::string, ObjectImpl> lib = objects_detail::build_library();
  return lib;
}

inline const ObjectImpl* find_impl(const std::string& id) {
  auto& lib = object_library();
  auto it = lib.find(id);
  return it == lib.end() ? nullptr : &it->second;
}

inline ImplResolver library_resolver() {
  return [](const std::string& id) { return find_impl(id); };
}

inline std::vector<std::string> spec_ids() {
  return {"register.spec", "spinlock.spec", "chaselev.spec"};
}

// The spec conventionally paired with a library implementation.
inline std::string default_spec_for(const std::string& implId) {
  if (implId.rfind("register", 0) == 0) return "register.spec";
  if (implId.rfind("spinlock", 0) == 0) return "spinlock.spec";
  if (implId.rfind("chaselev", 0) == 0) return "chaselev.spec";
  return "";
}

// --- sequential histories of a specification -----------------------------------

// All complete sequential histories (inv immediately followed by res) of up
// to max_ops calls drawn from the given thread count, operation menu and
// input domain.  Object names the calls, e.g. "o.read".
inline std::vector<History> spec_histories(const ObjectSpec& spec,
                                           const std::string& object, int threads,
                                           int max_ops, const ValueDomain& inputs) {
  std::vector<History> out;
  struct Rec {
    const ObjectSpec& spec;
    const std::string& object;
    int threads, max_ops;
    const ValueDomain& inputs;
    std::vector<History>& out;
    void go(const SpecState& s, const History& h, int ops,
            std::map<std::pair<int, std::string>, int>& counts) {
      out.push_back(h);
      if (ops >= max_ops) return;
      for (int t = 0; t < threads; ++t) {
        for (auto& [opName, fn] : spec.ops) {
          std::vector<Value> args;
          if (spec.has_arg.at(opName))
            args.assign(inputs.begin(), inputs.end());
          else
            args.push_back(Value::bot());
          for (const Value& in : args) {
            for (auto& [s2, outv] : spec.step(opName, s, in)) {
              auto key = std::make_pair(t, opName);
              int n = ++counts[key];
              std::string label = object + "." + opName + (n > 1 ? "#" + std::to_string(n) : "");
              History h2 = h;
              h2.ev.push_back(inv_ev(t, label, in));
              h2.ev.push_back(res_ev(t, label, outv));
              go(s2, h2, ops + 1, counts);
              --counts[key];
            }
          }
        }
      }
    }
  } rec{spec, object, threads, max_ops, inputs, out};
  std::map<std::pair<int, std::string>, int> counts;
  History h0;
  rec.go(spec.init, h0, 0, counts);
  return out;
}

}  // namespace wmm
