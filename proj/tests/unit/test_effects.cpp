#include "doctest.h"
#include "helpers.hpp"

using namespace th;

TEST_CASE("a function without heap access has no effects") {
  Program p = parse_program("func f() entry { L0: ret }");
  SideEffectMap se = compute_side_effects(p);
  CHECK(se.of(0).loads.empty());
  CHECK(se.of(0).stores.empty());
}

TEST_CASE("callee loads show up in callers") {
  Analysis a = analyze_program(testkit::load_program("fig4.tir"));
  CHECK(a.effects.of(fn(a.program, "B::foo")).loads.to_string() == "{8}");
  CHECK(a.effects.of(fn(a.program, "test")).loads.may_touch(HeapOffset::fixed(8)));
  CHECK(a.effects.of(fn(a.program, "main")).loads.may_touch(HeapOffset::fixed(8)));
  CHECK(a.effects.of(fn(a.program, "main")).stores.to_string() == "{0}");
  CHECK(!a.effects.of(fn(a.program, "A::foo")).stores.may_touch(HeapOffset::fixed(0)));
}

TEST_CASE("transitive store closure") {
  Program p = parse_program(R"(
func f(%o) entry { L0: call @g(%o) ret }
func g(%o) { L0: call @h(%o) ret }
func h(%o) {
L0:
  %i = const 16
  %k = const 1
  storeidx %o, %i, %k
  store %o @ 8, %k
  ret
}
)");
  SideEffectMap se = compute_side_effects(p);
  for (const char* name : {"f", "g", "h"}) {
    const EffectSet& s = se.of(fn(p, name)).stores;
    CHECK(s.offsets == std::set<std::int64_t>{8});
    CHECK(s.dynamic);
    CHECK(!s.top);
    CHECK(s.may_touch(HeapOffset::fixed(0)));
  }
}

TEST_CASE("external calls with address arguments store anywhere") {
  Program p = parse_program(R"(
func f(%o) entry {
L0:
  %k = const 1
  call @Lib(%o)
  call @Pure(%k)
  ret
}
)");
  SideEffectMap se = compute_side_effects(p);
  CHECK(se.of(0).stores.top);
  CHECK(se.of(0).stores.to_string() == "*");
}

TEST_CASE("effect set merge is monotone") {
  EffectSet a, b;
  a.add(HeapOffset::fixed(0));
  b.add(HeapOffset::fixed(8));
  CHECK(a.merge(b));
  CHECK(!a.merge(b));
  CHECK(a.offsets == std::set<std::int64_t>{0, 8});
  CHECK(a.intersects(b));
  EffectSet c;
  c.add(HeapOffset::fixed(16));
  CHECK(!a.intersects(c));
  c.add(HeapOffset::any());
  CHECK(a.intersects(c));
}

TEST_CASE("callee effects are contained in caller effects on generated programs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Analysis a = analyze(testkit::generate_program(seed, 80));
    for (const auto& e : a.call_graph().edges) {
      if (a.call_graph().is_external(e.callee) || !a.call_graph().reachable[e.site.function]) continue;
      FunctionEffects caller = a.effects.of(e.site.function);
      CAPTURE(seed);
      CHECK(!caller.loads.merge(a.effects.of(e.callee).loads));
      CHECK(!caller.stores.merge(a.effects.of(e.callee).stores));
    }
  }
}
