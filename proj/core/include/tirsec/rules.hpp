#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tirsec/diagnostics.hpp"
#include "tirsec/ir.hpp"

namespace tirsec {

struct TaintSource {
  std::string function;
  bool is_return = true;
  std::uint32_t param = 0;  // when !is_return
  bool event = false;
};

struct TaintSink {
  std::string function;
  std::uint32_t param = 0;
};

enum class PairRole { Producer, Consumer };

struct PairTag {
  PairRole role = PairRole::Producer;
  std::string tag;
};

struct TaintRule {
  std::string name;
  int severity = 1;
  TaintSource source;
  std::vector<TaintSink> sinks;
  std::optional<PairTag> pair;
  std::uint32_t line = 0;
};

enum class PrivilegeMode { ForbidExtra, RequireAll, ReportUnchecked };

std::string_view privilege_mode_name(PrivilegeMode m);

inline constexpr std::string_view kDefaultChecker = "CheckUserPrivilege";

struct PrivilegeRule {
  std::string name;
  PrivilegeMode mode = PrivilegeMode::ForbidExtra;
  std::string source;
  std::string sink;
  /// Declared privilege set (UPVS), sorted and unique.
  std::vector<std::string> privileges;
  std::string checker = std::string(kDefaultChecker);
  std::uint32_t line = 0;
};

struct RuleSet {
  std::vector<TaintRule> taint_rules;
  std::vector<PrivilegeRule> privilege_rules;

  bool empty() const noexcept { return taint_rules.empty() && privilege_rules.empty(); }
};

/// Throws ParseError on syntax errors, duplicate rule names, severities outside
/// 1..10 and empty privilege sets in modes that compare against them.
RuleSet parse_rules(std::string_view text, std::string_view file_name = {});

std::string print_rules(const RuleSet& rs);

/// Warnings for source/sink functions the program neither defines nor calls;
/// errors for parameter positions outside a present function's arity and for
/// event sources naming a return value.
std::vector<Diagnostic> validate_rules(const RuleSet& rs, const Program& p);

}  // namespace tirsec
