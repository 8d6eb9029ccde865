#include "doctest.h"
#include "helpers.hpp"

using namespace th;

namespace {

struct Fixture {
  Program p;
  FunctionContext ctx;
  explicit Fixture(const std::string& text) : p(parse_program(text)), ctx(p.functions[0]) {}
  ValueId v(const std::string& n) const { return *p.functions[0].find_value(n); }
  const PointsToMap& pts() const { return ctx.alias.points_to(); }
};

}  // namespace

TEST_CASE("points-to of new, phi and parameters") {
  Fixture f(R"(
func f(%c, %p) {
L0:
  %a = new A
  br %c, L1, L2
L1:
  %b = new A
  jmp L2
L2:
  %m = phi [%a, L0], [%b, L1]
  %l = load %p @ 0
  ret
}
class A { field x @ 0 })");
  CHECK(f.pts().of(f.v("a")).size() == 1);
  CHECK(f.pts().objects[f.pts().of(f.v("a"))[0]].site.block == 0);
  CHECK(f.pts().of(f.v("m")) == std::vector<std::uint32_t>{f.pts().of(f.v("a"))[0], f.pts().of(f.v("b"))[0]});
  CHECK(f.pts().of(f.v("p")) == std::vector<std::uint32_t>{kUnknownObject});
  CHECK(f.pts().has_unknown(f.v("l")));
}

TEST_CASE("fig4: parameters p and q may alias") {
  Program p = testkit::load_program("fig4.tir");
  FunctionId t = fn(p, "test");
  FunctionContext ctx(p.functions[t]);
  ValueId pv = val(p, "test", "p"), qv = val(p, "test", "q");
  CHECK(ctx.alias.points_to().of(pv) == std::vector<std::uint32_t>{kUnknownObject});
  CHECK(ctx.alias.may_alias(pv, qv));
  CHECK(!ctx.alias.must_alias(pv, qv));
}

TEST_CASE("may and must alias on names") {
  Fixture f(R"(
func f(%p, %c) {
L0:
  %a = new A
  %b = new A
  %a2 = %a
  br %c, L1, L2
L1:
  %i = phi [%a, L0], [%n, L1]
  %n = new A
  br %c, L1, L2
L2:
  ret
}
class A { field x @ 0 })");
  const AliasOracle& al = f.ctx.alias;
  CHECK(!al.may_alias(f.v("a"), f.v("b")));
  CHECK(al.may_alias(f.v("a"), f.v("a")));
  CHECK(al.must_alias(f.v("a"), f.v("a")));
  CHECK(al.may_alias(f.v("p"), f.v("a")));
  CHECK(al.must_alias(f.v("a"), f.v("a2")));
  CHECK(!al.must_alias(f.v("a"), f.v("b")));
  // %i holds the previous iteration's %n
  CHECK(al.may_alias(f.v("i"), f.v("n")));
  CHECK(!al.must_alias(f.v("i"), f.v("n")));
  std::uint32_t loop_site = f.pts().of(f.v("n"))[0];
  CHECK(!al.statically_unique(loop_site));
  CHECK(al.statically_unique(f.pts().of(f.v("a"))[0]));
  // n against itself is still the same value
  CHECK(al.must_alias(f.v("n"), f.v("n")));
}

TEST_CASE("a loop allocation yields different addresses across iterations") {
  // Two unrolled iterations of the loop body, run concretely.
  Program p = parse_program(R"(
class A { field x @ 0 }
func main() entry {
L0:
  %n1 = new A
  %i2 = %n1
  %n2 = new A
  ret
})");
  auto t = testkit::interpret(p, 100);
  CHECK(!(t.state.env.at("i2") == t.state.env.at("n2")));
}

TEST_CASE("value numbering") {
  Fixture f(R"(
func f(%o, %a, %b) {
L0:
  %c = %a
  %x = binop %a, %b
  %y = binop %c, %b
  %l1 = load %o @ 8
  %l2 = load %o @ 8
  store %o @ 8, %x
  %l3 = load %o @ 8
  ret
})");
  const auto& vn = f.ctx.alias.numbering().number;
  CHECK(vn[f.v("a")] == vn[f.v("c")]);
  CHECK(vn[f.v("x")] == vn[f.v("y")]);
  CHECK(vn[f.v("a")] != vn[f.v("b")]);
  CHECK(vn[f.v("l1")] == vn[f.v("l2")]);
  CHECK(vn[f.v("l1")] != vn[f.v("l3")]);
}

TEST_CASE("loads across a store can observe different values") {
  Program p = parse_program(R"(
class A { field x @ 0 }
func main() entry {
L0:
  %o = new A
  %one = const 1
  store %o @ 0, %one
  %l1 = load %o @ 0
  %two = const 2
  store %o @ 0, %two
  %l2 = load %o @ 0
  ret
})");
  auto t = testkit::interpret(p, 100);
  CHECK(!(t.state.env.at("l1") == t.state.env.at("l2")));
}

TEST_CASE("heap locations: static and dynamic offsets") {
  Fixture f(R"(
func f(%o, %q) {
L0:
  %i = const 16
  %j = %i
  %k = const 24
  ret
})");
  const AliasOracle& al = f.ctx.alias;
  HeapLocation o0{f.v("o"), HeapOffset::fixed(0)};
  HeapLocation o8{f.v("o"), HeapOffset::fixed(8)};
  HeapLocation oi{f.v("o"), HeapOffset::dynamic(f.v("i"))};
  HeapLocation oj{f.v("o"), HeapOffset::dynamic(f.v("j"))};
  HeapLocation ok{f.v("o"), HeapOffset::dynamic(f.v("k"))};
  HeapLocation q0{f.v("q"), HeapOffset::fixed(0)};
  CHECK(al.must_alias(o0, o0));
  CHECK(!al.may_alias(o0, o8));
  CHECK(al.may_alias(o0, oi));
  CHECK(!al.must_alias(o0, oi));
  CHECK(al.must_alias(oi, oj));
  CHECK(al.may_alias(oi, ok));
  CHECK(!al.must_alias(oi, ok));
  CHECK(al.may_alias(o0, q0));
  CHECK(!al.must_alias(o0, q0));
  CHECK(offsets_may_overlap(HeapOffset::any(), HeapOffset::fixed(8)));
  CHECK(!offsets_may_overlap(HeapOffset::fixed(0), HeapOffset::fixed(8)));
}

TEST_CASE("alias relations are reflexive and symmetric, and must implies may") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Program p = parse_program(testkit::generate_program(seed, 60));
    for (const auto& f : p.functions) {
      FunctionContext ctx(f);
      const auto n = static_cast<ValueId>(f.value_count());
      for (ValueId a = 0; a < n; ++a) {
        CHECK(ctx.alias.may_alias(a, a));
        for (ValueId b = 0; b < n; ++b) {
          bool may = ctx.alias.may_alias(a, b), must = ctx.alias.must_alias(a, b);
          CHECK(may == ctx.alias.may_alias(b, a));
          CHECK(must == ctx.alias.must_alias(b, a));
          if (must) CHECK(may);
        }
      }
    }
  }
}

TEST_CASE("must alias holds on every explored input") {
  // Inputs drawn from {0, 1, 2}; only the entry activation is inspected.
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    Program p = parse_program(testkit::generate_program(seed, 30));
    FunctionId main_id = fn(p, "main");
    const Function& f = p.functions[main_id];
    FunctionContext ctx(f);
    for (std::int64_t x : {0, 1, 2}) {
      for (std::int64_t y : {0, 1, 2}) {
        auto t = testkit::interpret(p, 20000, {x, y});
        if (t.status != testkit::Trace::Status::Finished) continue;
        for (const auto& [na, va] : t.state.env) {
          for (const auto& [nb, vb] : t.state.env) {
            if (va.kind != testkit::RtValue::Kind::Obj || vb.kind != testkit::RtValue::Kind::Obj) continue;
            ValueId a = *f.find_value(na), b = *f.find_value(nb);
            // Values defined inside a loop may come from different iterations.
            if (ctx.alias.must_alias(a, b) && f.defs[a].block == f.defs[b].block) {
              CAPTURE(seed);
              CHECK(va == vb);
            }
            if (va == vb) CHECK(ctx.alias.may_alias(a, b));
          }
        }
      }
    }
  }
}
