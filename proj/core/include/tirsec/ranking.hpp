#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tirsec/context.hpp"
#include "tirsec/taint.hpp"

namespace tirsec {

/// 1 when the witness crosses a call boundary into a defined function.
int call_distance(const Finding& f);

/// Region-tree distance between source and sink; nullopt (N/A) for
/// interprocedural findings.
std::optional<std::uint32_t> control_distance(const Finding& f, const std::vector<FunctionContext>& ctx);

/// Fills `call_distance` and `control_distance` of every finding.
void annotate_metrics(std::vector<Finding>& fs, const std::vector<FunctionContext>& ctx);

/// Severity desc, call distance asc, control distance asc (N/A last), then
/// source site, sink site and rule name.
bool rank_before(const Finding& a, const Finding& b);

struct RankedReport {
  std::vector<Finding> findings;
  std::optional<std::size_t> cutoff;
  std::size_t total = 0;  // findings before truncation
};

RankedReport rank_findings(std::vector<Finding> fs, std::optional<std::size_t> cutoff);

}  // namespace tirsec
