#include "doctest.h"
#include "helpers.hpp"

using namespace th;

namespace {

std::vector<std::string> names(const CallGraph& cg, const std::vector<CallNode>& path) {
  std::vector<std::string> out;
  for (CallNode n : path) out.push_back(cg.names[n]);
  return out;
}

}  // namespace

TEST_CASE("entry functions") {
  Program one = parse_program("func main() entry { L0: ret }");
  CHECK(entry_functions(one) == std::vector<FunctionId>{0});

  Program fig7 = testkit::load_program("fig7.tir");
  auto roots = entry_functions(fig7);
  CHECK(roots == std::vector<FunctionId>{fn(fig7, "main"), fn(fig7, "OnCameraPreviewed")});

  Program none = parse_program("func f() { L0: ret }");
  std::vector<Diagnostic> ds;
  CHECK(entry_functions(none, &ds).empty());
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].severity == Severity::Warning);
}

TEST_CASE("fig4 vcall resolution") {
  Analysis must = analyze_program(testkit::load_program("fig4_noalias.tir"));
  CHECK(callee_names(must.call_graph(), site(must.program, "test", Opcode::VCall)) ==
        std::vector<std::string>{"B::foo"});
  Analysis may = analyze_program(testkit::load_program("fig4.tir"));
  CHECK(callee_names(may.call_graph(), site(may.program, "test", Opcode::VCall)) ==
        std::vector<std::string>{"B::foo", "C::foo"});
  // the class-hierarchy graph takes every override of the slot
  CHECK(callee_names(may.cha_graph, site(may.program, "test", Opcode::VCall)) ==
        std::vector<std::string>{"A::foo", "B::foo", "C::foo"});
}

TEST_CASE("function pointers") {
  Analysis a = analyze(R"(
func g() { L0: ret }
func h() { L0: ret }
func k(%x) { L0: ret }
func main(%box) entry {
L0:
  %f = funcaddr @g
  icall %f()
  %hp = funcaddr @h
  %kp = funcaddr @k
  store %box @ 0, %hp
  %loaded = load %box @ 0
  icall %loaded()
  ret
})");
  const CallGraph& cg = a.call_graph();
  CHECK(callee_names(cg, site(a.program, "main", Opcode::ICall, 0)) == std::vector<std::string>{"g"});
  // a pointer loaded from the heap falls back to every address-taken function of matching arity
  Site unresolved = site(a.program, "main", Opcode::ICall, 1);
  CHECK(callee_names(cg, unresolved) == std::vector<std::string>{"g", "h"});
  CHECK(cg.unresolved_icalls.count(unresolved) == 1);
  CHECK(address_taken_with_arity(a.program, 1) == std::vector<FunctionId>{fn(a.program, "k")});
}

TEST_CASE("call graph structure") {
  Analysis a = analyze(R"(
func a() entry { L0: call @b() call @ext() ret }
func b() { L0: call @c() ret }
func c() { L0: ret }
func dead() { L0: call @c() ret }
)");
  const CallGraph& cg = a.call_graph();
  CHECK(cg.defined_count == 4);
  CHECK(cg.names.back() == "ext");
  CHECK(cg.is_external(*cg.find("ext")));
  CHECK(!cg.reachable[fn(a.program, "dead")]);
  for (const auto& e : cg.edges) CHECK(e.site.function != fn(a.program, "dead"));
  auto paths = enumerate_paths(cg, *cg.find("a"), *cg.find("c"));
  REQUIRE(paths.size() == 1);
  CHECK(names(cg, paths[0]) == std::vector<std::string>{"a", "b", "c"});
  CHECK(dump_call_graph(a.program, cg) == "a -> b @ a:L0:0\na -> ext @ a:L0:1\nb -> c @ b:L0:0\n");
}

TEST_CASE("diamond paths come back in a fixed order") {
  Analysis a = analyze(R"(
func a() entry { L0: call @c() call @b() ret }
func b() { L0: call @d() ret }
func c() { L0: call @d() ret }
func d() { L0: ret }
)");
  const CallGraph& cg = a.call_graph();
  auto paths = enumerate_paths(cg, *cg.find("a"), *cg.find("d"));
  REQUIRE(paths.size() == 2);
  CHECK(names(cg, paths[0]) == std::vector<std::string>{"a", "b", "d"});
  CHECK(names(cg, paths[1]) == std::vector<std::string>{"a", "c", "d"});
  CHECK(enumerate_paths(cg, *cg.find("a"), *cg.find("d"), 1).empty());
  CHECK(enumerate_paths(cg, *cg.find("d"), *cg.find("a")).empty());
}

TEST_CASE("fig8 path") {
  Analysis a = analyze_program(testkit::load_program("fig8.tir"));
  const CallGraph& cg = a.call_graph();
  auto paths = enumerate_paths(cg, *cg.find("ButtonEvent"), *cg.find("BlueToothOp"));
  REQUIRE(paths.size() == 1);
  CHECK(format_call_path(cg, paths[0]) == "ButtonEvent->evaluate->BlueToothOp");
}

TEST_CASE("recursion: simple paths only") {
  Analysis a = analyze(R"(
func a() entry { L0: call @b() ret }
func b() { L0: call @a() call @c() call @b() ret }
func c() { L0: ret }
)");
  const CallGraph& cg = a.call_graph();
  auto paths = enumerate_paths(cg, *cg.find("a"), *cg.find("c"));
  REQUIRE(paths.size() == 1);
  CHECK(names(cg, paths[0]) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("graph invariants on generated programs") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    CAPTURE(seed);
    Analysis a = analyze(testkit::generate_program(seed, 80));
    const CallGraph& cg = a.call_graph();
    const Program& p = a.program;
    // refined graph is a subset of the conservative one
    for (const auto& e : cg.edges) CHECK(std::binary_search(a.cha_graph.edges.begin(), a.cha_graph.edges.end(), e));
    for (FunctionId f = 0; f < p.functions.size(); ++f) {
      if (!cg.reachable[f]) continue;
      for (BlockId b = 0; b < p.functions[f].blocks.size(); ++b) {
        for (std::uint32_t i = 0; i < p.functions[f].blocks[b].instructions.size(); ++i) {
          const Instruction& inst = p.functions[f].blocks[b].instructions[i];
          Site s{f, b, i};
          if (inst.op == Opcode::Call) {
            CHECK(cg.edges_at(s).size() == 1);
          } else if (inst.op == Opcode::VCall) {
            std::set<std::string> want;
            for (ClassId c : a.types().of(f, inst.operands[0]).members()) want.insert(*a.hierarchy.lookup(c, inst.imm));
            auto got = callee_names(cg, s);
            CHECK(std::set<std::string>(got.begin(), got.end()) == want);
          }
        }
      }
    }
    // path enumeration agrees with exhaustive search and never repeats
    CallNode from = *cg.find("main");
    for (CallNode to = 0; to < cg.node_count(); ++to) {
      auto paths = enumerate_paths(cg, from, to, 6);
      std::set<std::vector<CallNode>> uniq(paths.begin(), paths.end());
      CHECK(uniq.size() == paths.size());
      CHECK(uniq == testkit::all_call_paths(cg, from, to, 6));
      for (const auto& path : paths)
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
          auto cs = cg.callees(path[k]);
          CHECK(std::find(cs.begin(), cs.end(), path[k + 1]) != cs.end());
        }
    }
  }
}

TEST_CASE("executed call edges are in the graph") {
  for (std::uint64_t seed = 500; seed < 600; ++seed) {
    Program p = parse_program(testkit::generate_program(seed, 100));
    auto t = testkit::interpret(p, 100000, {static_cast<std::int64_t>(seed), 2});
    if (t.status != testkit::Trace::Status::Finished) continue;
    Analysis a = analyze_program(std::move(p));
    for (const auto& [s, callee] : t.call_edges) {
      CAPTURE(seed);
      CHECK(a.call_graph().has_edge(s, callee));
    }
  }
}
