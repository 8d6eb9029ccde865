#include "tirsec/privilege.hpp"

#include <algorithm>

namespace tirsec {
namespace {

// Follows copies back to a string constant.
std::optional<std::string> constant_string(const Function& f, ValueId v) {
  for (int guard = 0; guard < 64; ++guard) {
    DefPoint d = f.defs[v];
    if (!d.defined() || d.is_param()) return std::nullopt;
    const Instruction& inst = f.instruction_at(d);
    if (inst.op == Opcode::ConstStr) return inst.symbol;
    if (inst.op != Opcode::Copy) return std::nullopt;
    v = inst.operands[0];
  }
  return std::nullopt;
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

PrivilegeSummary summarize_privileges(const Program& p, const CallGraph& cg, FunctionId fid, std::string_view checker) {
  PrivilegeSummary s;
  const Function& f = p.functions[fid];
  for (BlockId b = 0; b < f.blocks.size(); ++b) {
    const auto& insts = f.blocks[b].instructions;
    for (std::uint32_t i = 0; i < insts.size(); ++i) {
      const Instruction& inst = insts[i];
      if (!is_call(inst.op)) continue;
      Site site{fid, b, i};
      bool is_checker = inst.op == Opcode::Call && inst.symbol == checker;
      for (const auto& e : cg.edges_at(site)) is_checker |= cg.names[e.callee] == checker;
      if (!is_checker) continue;
      s.sites.push_back(site);
      for (ValueId a : inst.actual_arguments()) {
        auto str = constant_string(f, a);
        s.privileges.push_back(str ? *str : std::string(kUnknownPrivilege));
      }
      if (inst.actual_arguments().empty()) s.privileges.emplace_back(kUnknownPrivilege);
    }
  }
  sort_unique(s.privileges);
  return s;
}

std::vector<PathTrace> collect_privilege_paths(const CallGraph& cg, const Program& p, const PrivilegeRule& rule,
                                               std::size_t bound) {
  std::vector<PathTrace> out;
  auto src = cg.find(rule.source);
  auto snk = cg.find(rule.sink);
  if (!src || !snk || !cg.reachable[*src]) return out;
  std::vector<std::optional<PrivilegeSummary>> cache(cg.node_count());
  for (auto& path : enumerate_paths(cg, *src, *snk, bound)) {
    PathTrace t;
    t.rule = rule.name;
    for (CallNode n : path) {
      if (cg.is_external(n)) continue;
      if (!cache[n]) cache[n] = summarize_privileges(p, cg, n, rule.checker);
      t.pvs.insert(t.pvs.end(), cache[n]->privileges.begin(), cache[n]->privileges.end());
      t.checker_sites.insert(t.checker_sites.end(), cache[n]->sites.begin(), cache[n]->sites.end());
    }
    sort_unique(t.pvs);
    t.path = std::move(path);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PathViolation> detect_violations(const std::vector<PathTrace>& traces, const PrivilegeRule& rule) {
  std::vector<PathViolation> out;
  for (const auto& t : traces) {
    PathViolation v{t, rule.mode, {}};
    switch (rule.mode) {
      case PrivilegeMode::ForbidExtra:
        std::set_difference(t.pvs.begin(), t.pvs.end(), rule.privileges.begin(), rule.privileges.end(),
                            std::back_inserter(v.offending));
        if (!v.offending.empty()) out.push_back(std::move(v));
        break;
      case PrivilegeMode::RequireAll:
        std::set_difference(rule.privileges.begin(), rule.privileges.end(), t.pvs.begin(), t.pvs.end(),
                            std::back_inserter(v.offending));
        if (!v.offending.empty()) out.push_back(std::move(v));
        break;
      case PrivilegeMode::ReportUnchecked:
        if (t.pvs.empty()) out.push_back(std::move(v));
        break;
    }
  }
  return out;
}

std::vector<UncheckedSource> unchecked_sources(const RuleSet& rs, const std::vector<std::vector<PathTrace>>& traces) {
  std::vector<UncheckedSource> out;
  for (std::size_t r = 0; r < rs.privilege_rules.size() && r < traces.size(); ++r) {
    const PrivilegeRule& rule = rs.privilege_rules[r];
    if (rule.mode != PrivilegeMode::ReportUnchecked || traces[r].empty()) continue;
    bool all_empty = std::all_of(traces[r].begin(), traces[r].end(), [](const PathTrace& t) { return t.pvs.empty(); });
    if (all_empty) out.push_back({rule.name, rule.source, traces[r].size()});
  }
  return out;
}

}  // namespace tirsec
