#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tirsec/callgraph.hpp"
#include "tirsec/class_hierarchy.hpp"
#include "tirsec/class_types.hpp"
#include "tirsec/context.hpp"
#include "tirsec/diagnostics.hpp"
#include "tirsec/hssa.hpp"
#include "tirsec/privilege.hpp"
#include "tirsec/ranking.hpp"
#include "tirsec/rules.hpp"
#include "tirsec/side_effects.hpp"
#include "tirsec/taint.hpp"

namespace tirsec {

/// Every whole-program artifact up to the refined heap SSA.
///
/// Heap SSA is built twice: first with side effects over the conservative
/// call graph (input to class type analysis), then once more with side
/// effects over the refined call graph.
struct Analysis {
  Program program;
  std::vector<Diagnostic> diagnostics;
  ClassHierarchy hierarchy;
  std::vector<FunctionContext> contexts;
  CallGraph cha_graph;
  std::vector<HssaForm> initial_hssa;
  ClassTypeResult cta;
  SideEffectMap effects;
  std::vector<HssaForm> hssa;

  const CallGraph& call_graph() const noexcept { return cta.call_graph; }
  const TypeMap& types() const noexcept { return cta.types; }
};

/// Validates and analyzes `p`. Throws AnalysisError when validation reports
/// errors or the class hierarchy is inconsistent.
Analysis analyze_program(Program p);

struct AppOptions {
  bool implicit_flows = true;
  std::optional<std::size_t> cutoff;
};

struct AppResult {
  RankedReport report;
  std::vector<Diagnostic> diagnostics;
};

/// Pseudo-uses (unless disabled), taint propagation, metrics and ranking.
AppResult run_app_pipeline(Analysis& a, const RuleSet& rs, const AppOptions& opts = {});

struct ApiResult {
  std::vector<std::vector<PathTrace>> traces;  // per privilege rule
  std::vector<PathViolation> violations;
  std::vector<UncheckedSource> unchecked;
  std::vector<Diagnostic> diagnostics;
};

ApiResult run_api_pipeline(const Analysis& a, const RuleSet& rs, std::size_t path_bound = 64);

}  // namespace tirsec
