#include "tirsec/pipeline.hpp"

#include "tirsec/validate.hpp"

namespace tirsec {

Analysis analyze_program(Program p) {
  Analysis a;
  a.diagnostics = validate_program(p);
  if (has_errors(a.diagnostics)) {
    std::string msg = "program is not valid SSA";
    for (const auto& d : a.diagnostics) {
      if (d.severity == Severity::Error) {
        msg += "\n" + format_diagnostic(d);
      }
    }
    throw AnalysisError(msg);
  }
  a.program = std::move(p);
  const Program& prog = a.program;
  a.hierarchy = build_class_hierarchy(prog);
  a.contexts = build_contexts(prog);
  a.cha_graph = build_cha_call_graph(prog, a.hierarchy, a.contexts);
  SideEffectMap initial = compute_side_effects(prog, a.cha_graph, a.contexts);
  a.initial_hssa = build_all_hssa(prog, a.contexts, initial, a.cha_graph);
  a.cta = run_class_type_analysis(prog, a.hierarchy, a.contexts, a.initial_hssa);
  a.effects = compute_side_effects(prog, a.cta.call_graph, a.contexts);
  a.hssa = build_all_hssa(prog, a.contexts, a.effects, a.cta.call_graph);
  return a;
}

AppResult run_app_pipeline(Analysis& a, const RuleSet& rs, const AppOptions& opts) {
  AppResult r;
  r.diagnostics = validate_rules(rs, a.program);
  if (opts.implicit_flows) {
    insert_pseudo_uses(a.program, a.contexts);
  } else {
    for (auto& f : a.program.functions) {
      for (auto& b : f.blocks) {
        for (auto& inst : b.instructions) inst.pseudo_uses.clear();
      }
    }
  }
  auto findings = run_taint_analysis(a.program, rs, a.hssa, a.call_graph(), a.contexts);
  annotate_metrics(findings, a.contexts);
  r.report = rank_findings(std::move(findings), opts.cutoff);
  return r;
}

ApiResult run_api_pipeline(const Analysis& a, const RuleSet& rs, std::size_t path_bound) {
  ApiResult r;
  r.diagnostics = validate_rules(rs, a.program);
  for (const auto& rule : rs.privilege_rules) {
    r.traces.push_back(collect_privilege_paths(a.call_graph(), a.program, rule, path_bound));
    auto v = detect_violations(r.traces.back(), rule);
    r.violations.insert(r.violations.end(), v.begin(), v.end());
  }
  r.unchecked = unchecked_sources(rs, r.traces);
  return r;
}

}  // namespace tirsec
