#include "tirsec_cli/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tirsec/tirsec.hpp"

namespace tirsec::cli {
namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostics(const std::vector<Diagnostic>& ds, std::ostream& err) {
  for (const auto& d : ds) err << format_diagnostic(d) << "\n";
}

std::string dump(const Analysis& a, const std::string& what) {
  const Program& p = a.program;
  std::string out;
  if (what == "cfg") {
    for (FunctionId f = 0; f < p.functions.size(); ++f) out += dump_cfg(p.functions[f], a.contexts[f].cfg);
  } else if (what == "hssa") {
    for (FunctionId f = 0; f < p.functions.size(); ++f) {
      out += "func " + p.functions[f].name + "\n" + dump_hssa(p, a.hssa[f]);
    }
  } else if (what == "callgraph") {
    out = dump_call_graph(p, a.call_graph());
  } else {
    out = dump_types(p, a.hierarchy, a.types());
  }
  return out;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.inputs.empty()) throw InputError("no IR input files");
    std::vector<SourceText> sources;
    for (const auto& path : cfg.inputs) sources.push_back({path, read_file(path)});
    RuleSet rules;
    if (cfg.mode != Mode::Dump) {
      if (cfg.rules_path.empty()) throw InputError("--rules is required in this mode");
      rules = parse_rules(read_file(cfg.rules_path), cfg.rules_path);
    }
    Program program = parse_program(sources);
    Analysis a = analyze_program(std::move(program));
    print_diagnostics(a.diagnostics, err);

    const ReportFormat fmt = cfg.tsv ? ReportFormat::Tsv : ReportFormat::Text;
    switch (cfg.mode) {
      case Mode::Dump:
        out << dump(a, cfg.dump_what);
        return kExitClean;
      case Mode::AppTaint: {
        AppOptions opts;
        opts.cutoff = cfg.cutoff;
        opts.implicit_flows = cfg.implicit_flows;
        AppResult r = run_app_pipeline(a, rules, opts);
        print_diagnostics(r.diagnostics, err);
        if (has_errors(r.diagnostics)) return kExitInputError;
        out << emit_taint_report(a.program, r.report, fmt);
        return r.report.findings.empty() ? kExitClean : kExitFindings;
      }
      case Mode::ApiPrivilege: {
        ApiResult r = run_api_pipeline(a, rules, cfg.path_bound);
        print_diagnostics(r.diagnostics, err);
        if (has_errors(r.diagnostics)) return kExitInputError;
        out << emit_privilege_report(a.call_graph(), r, fmt);
        return r.violations.empty() ? kExitClean : kExitFindings;
      }
    }
  } catch (const ParseError& e) {
    err << e.what() << "\n";
  } catch (const AnalysisError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-driven taint and privilege-path analysis for .tir programs", "tirsec"};
  RunConfig cfg;
  std::string mode = "app-taint";
  std::string format = "text";
  std::size_t cutoff = 0;
  bool no_implicit = false;
  app.add_option("--mode", mode, "app-taint | api-privilege | dump")
      ->check(CLI::IsMember({"app-taint", "api-privilege", "dump"}));
  app.add_option("--rules", cfg.rules_path, "Rule file");
  app.add_option("--cutoff", cutoff, "Report at most N taint findings (0 = unlimited)");
  app.add_option("--format", format, "text | tsv")->check(CLI::IsMember({"text", "tsv"}));
  app.add_option("--path-bound", cfg.path_bound, "Maximum call-path length for privilege tracing");
  app.add_option("--dump", cfg.dump_what, "cfg | hssa | callgraph | types")
      ->check(CLI::IsMember({"cfg", "hssa", "callgraph", "types"}));
  app.add_flag("--no-implicit-flows", no_implicit, "Skip the pseudo-use prepass");
  app.add_option("inputs", cfg.inputs, "IR files")->required();

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (mode == "app-taint") cfg.mode = Mode::AppTaint;
  else if (mode == "api-privilege") cfg.mode = Mode::ApiPrivilege;
  else cfg.mode = Mode::Dump;
  if (cfg.mode == Mode::Dump && cfg.dump_what.empty()) {
    err << "error: --mode dump requires --dump\n";
    return kExitInputError;
  }
  if (!cfg.dump_what.empty() && cfg.mode != Mode::Dump) cfg.mode = Mode::Dump;
  if (cutoff > 0) cfg.cutoff = cutoff;
  cfg.tsv = format == "tsv";
  cfg.implicit_flows = !no_implicit;
  return run(cfg, out, err);
}

}  // namespace tirsec::cli
