#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tirsec/tirsec.hpp"
#include "tirsec_testkit/fixtures.hpp"
#include "tirsec_testkit/generator.hpp"
#include "tirsec_testkit/interpreter.hpp"
#include "tirsec_testkit/oracles.hpp"

namespace th {

using namespace tirsec;

inline Analysis analyze(const std::string& text) { return analyze_program(parse_program(text)); }

inline FunctionId fn(const Program& p, const std::string& name) { return p.find_function(name).value(); }

inline ValueId val(const Program& p, const std::string& f, const std::string& v) {
  return p.functions[fn(p, f)].find_value(v).value();
}

/// The `nth` instruction with opcode `op` in function `f`, in block order.
inline Site site(const Program& p, const std::string& f, Opcode op, int nth = 0) {
  FunctionId id = fn(p, f);
  const Function& func = p.functions[id];
  for (BlockId b = 0; b < func.blocks.size(); ++b)
    for (std::uint32_t i = 0; i < func.blocks[b].instructions.size(); ++i)
      if (func.blocks[b].instructions[i].op == op && nth-- == 0) return {id, b, i};
  throw std::runtime_error("instruction not found in " + f);
}

inline std::vector<std::string> callee_names(const CallGraph& cg, const Site& s) {
  std::vector<std::string> out;
  for (const auto& e : cg.edges_at(s)) out.push_back(cg.names[e.callee]);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<Finding> taint(const std::string& tir, const std::string& rules, bool implicit = true) {
  Analysis a = analyze(tir);
  AppOptions o;
  o.implicit_flows = implicit;
  return run_app_pipeline(a, parse_rules(rules), o).report.findings;
}

}  // namespace th
