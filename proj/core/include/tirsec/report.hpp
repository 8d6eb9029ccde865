#pragma once

#include <string>

#include "tirsec/pipeline.hpp"

namespace tirsec {

enum class ReportFormat { Text, Tsv };

inline constexpr const char* kTaintTsvHeader =
    "rule\tseverity\tsource_site\tsink_site\tcall_distance\tcontrol_distance\twitness_len";
inline constexpr const char* kPrivilegeTsvHeader = "rule\tmode\tpath\tpvs\toffending";

std::string emit_taint_report(const Program& p, const RankedReport& r, ReportFormat fmt);
std::string emit_privilege_report(const CallGraph& cg, const ApiResult& r, ReportFormat fmt);

std::string format_call_path(const CallGraph& cg, const std::vector<CallNode>& path);

}  // namespace tirsec
