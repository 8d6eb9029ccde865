#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tirsec/callgraph.hpp"
#include "tirsec/rules.hpp"

namespace tirsec {

/// Marker added to a PVS when a checker argument is not a string constant.
inline constexpr std::string_view kUnknownPrivilege = "UNKNOWN_PRIV";

struct PathTrace {
  std::string rule;
  /// Call-graph nodes from the rule source to the rule sink, inclusive.
  std::vector<CallNode> path;
  /// Exercised privileges, sorted and unique.
  std::vector<std::string> pvs;
  std::vector<Site> checker_sites;
};

struct PathViolation {
  PathTrace trace;
  PrivilegeMode mode = PrivilegeMode::ForbidExtra;
  /// Extra privileges (forbid-extra) or missing ones (require-all); empty for
  /// report-unchecked.
  std::vector<std::string> offending;
};

/// Privileges named by checker calls anywhere in one function.
struct PrivilegeSummary {
  std::vector<std::string> privileges;
  std::vector<Site> sites;
};

PrivilegeSummary summarize_privileges(const Program& p, const CallGraph& cg, FunctionId f, std::string_view checker);

/// Every simple call path from the rule source to the rule sink, provided the
/// source is reachable from an entry. Paths are ordered lexicographically.
std::vector<PathTrace> collect_privilege_paths(const CallGraph& cg, const Program& p, const PrivilegeRule& rule,
                                               std::size_t bound = 64);

std::vector<PathViolation> detect_violations(const std::vector<PathTrace>& traces, const PrivilegeRule& rule);

/// Sources of report-unchecked rules whose every traced path has an empty
/// PVS: candidates for privilege checks that may be unnecessary upstream.
struct UncheckedSource {
  std::string rule;
  std::string source;
  std::size_t paths = 0;
};

std::vector<UncheckedSource> unchecked_sources(const RuleSet& rs, const std::vector<std::vector<PathTrace>>& traces);

}  // namespace tirsec
