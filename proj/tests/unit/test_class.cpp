#include "doctest.h"
#include "helpers.hpp"

using namespace th;

TEST_CASE("subclass cones") {
  Program p = testkit::load_program("fig4.tir");
  ClassHierarchy h = build_class_hierarchy(p);
  CHECK(h.subclass_cone("A") == std::vector<std::string>{"A", "B", "C"});
  CHECK(h.subclass_cone("B") == std::vector<std::string>{"B"});
  CHECK(h.is_subclass(*h.find("C"), *h.find("A")));
  CHECK(!h.is_subclass(*h.find("A"), *h.find("C")));
  CHECK_THROWS_AS(h.subclass_cone("Z"), std::out_of_range);

  Program single = parse_program("class S { field f @ 0 }");
  CHECK(build_class_hierarchy(single).subclass_cone("S") == std::vector<std::string>{"S"});
}

TEST_CASE("resolved vtables inherit and override along the ancestor chain") {
  Program p = parse_program(R"(
class A { vtable { 0 : A::foo  1 : A::bar } }
class B : A { vtable { 0 : B::foo } }
class C : B { }
func A::foo(%t) { L0: ret }
func A::bar(%t) { L0: ret }
func B::foo(%t) { L0: ret }
)");
  ClassHierarchy h = build_class_hierarchy(p);
  std::map<std::int64_t, std::string> want{{0, "B::foo"}, {1, "A::bar"}};
  CHECK(h.resolved_vtable(*h.find("B")) == want);
  CHECK(h.resolved_vtable(*h.find("C")) == want);
  CHECK(*h.lookup(*h.find("A"), 0) == "A::foo");
  CHECK(h.lookup(*h.find("A"), 7) == nullptr);
}

TEST_CASE("hierarchy errors") {
  Program cyc;
  cyc.classes = {ClassDecl{"A", "B", {}, {}, 1}, ClassDecl{"B", "A", {}, {}, 2}};
  cyc.reindex();
  CHECK_THROWS_AS(build_class_hierarchy(cyc), AnalysisError);
  Program missing;
  missing.classes = {ClassDecl{"A", "Nope", {}, {}, 1}};
  missing.reindex();
  CHECK_THROWS_AS(build_class_hierarchy(missing), AnalysisError);
}

TEST_CASE("class types on the fig4 variants") {
  Analysis may = analyze_program(testkit::load_program("fig4.tir"));
  FunctionId t = fn(may.program, "test");
  CHECK(sorted(may.types().names(may.hierarchy, t, val(may.program, "test", "m"))) ==
        std::vector<std::string>{"B", "C"});
  Analysis must = analyze_program(testkit::load_program("fig4_noalias.tir"));
  t = fn(must.program, "test");
  CHECK(must.types().names(must.hierarchy, t, val(must.program, "test", "m")) == std::vector<std::string>{"B"});
  CHECK(must.types().names(must.hierarchy, t, val(must.program, "test", "b")) == std::vector<std::string>{"B"});
  CHECK(dump_types(must.program, must.hierarchy, must.types()).find("test %m : {B}") != std::string::npos);
}

TEST_CASE("copies propagate types; scalars stay empty") {
  Analysis a = analyze(R"(
class A { field x @ 0 }
func main() entry {
L0:
  %a = new A
  %b = %a
  %k = const 3
  ret
})");
  CHECK(a.types().names(a.hierarchy, 0, val(a.program, "main", "b")) == std::vector<std::string>{"A"});
  CHECK(a.types().of(0, val(a.program, "main", "k")).empty());
}

TEST_CASE("types flow through parameters, returns and the heap") {
  Analysis a = analyze(R"(
class A { field next @ 0 }
class B : A { }
func make() {
L0:
  %o = new B
  ret %o
}
func keep(%box, %v) {
L0:
  store %box @ 0, %v
  ret
}
func main() entry {
L0:
  %box = new A
  %b = call @make()
  call @keep(%box, %b)
  %got = load %box @ 0
  ret
})");
  CHECK(a.types().names(a.hierarchy, fn(a.program, "main"), val(a.program, "main", "b")) ==
        std::vector<std::string>{"B"});
  CHECK(a.types().names(a.hierarchy, fn(a.program, "keep"), val(a.program, "keep", "v")) ==
        std::vector<std::string>{"B"});
  auto got = a.types().names(a.hierarchy, fn(a.program, "main"), val(a.program, "main", "got"));
  CHECK(std::find(got.begin(), got.end(), "B") != got.end());
}

TEST_CASE("adding an instantiation site never shrinks a type set") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    std::string text = testkit::generate_program(seed, 60);
    std::string more = text;
    std::size_t at = more.find("func main(%in0, %in1) entry {\nL0:\n");
    REQUIRE(at != std::string::npos);
    at += std::string("func main(%in0, %in1) entry {\nL0:\n").size();
    more.insert(at, "  %extra = new K0\n  store %extra @ 0, %extra\n  %extra8 = const 1\n  store %extra @ 8, %extra8\n"
                    "  %extrar = vcall %extra slot 0 (%extra8)\n");
    Analysis a = analyze(text);
    Analysis b = analyze(more);
    for (FunctionId f = 0; f < a.program.functions.size(); ++f) {
      for (ValueId v = 0; v < a.program.functions[f].value_count(); ++v) {
        ValueId w = *b.program.functions[f].find_value(a.program.functions[f].value_names[v]);
        for (ClassId c : a.types().of(f, v).members()) {
          CAPTURE(seed);
          CHECK(b.types().of(f, w).contains(c));
        }
      }
    }
  }
}

TEST_CASE("type sets only hold classes instantiated in reachable code") {
  Analysis a = analyze(R"(
class A { field x @ 0 }
class B : A { }
func unused() {
L0:
  %o = new B
  ret %o
}
func main(%p) entry {
L0:
  %a = new A
  store %p @ 0, %a
  %l = load %p @ 0
  ret
})");
  for (FunctionId f = 0; f < a.program.functions.size(); ++f)
    for (ValueId v = 0; v < a.program.functions[f].value_count(); ++v)
      CHECK(!a.types().of(f, v).contains(*a.hierarchy.find("B")));
}

TEST_CASE("run-time classes are in the type sets of generated programs") {
  for (std::uint64_t seed = 3000; seed < 3100; ++seed) {
    Program p = parse_program(testkit::generate_program(seed, 80));
    auto t = testkit::interpret(p, 100000, {static_cast<std::int64_t>(seed), 1});
    if (t.status != testkit::Trace::Status::Finished) continue;
    Analysis a = analyze_program(std::move(p));
    for (const auto& [key, seen] : t.classes)
      for (ClassId c : seen) {
        CAPTURE(seed);
        CHECK(a.types().of(key.first, key.second).contains(c));
      }
  }
}
