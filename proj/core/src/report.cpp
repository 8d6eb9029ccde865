#include "tirsec/report.hpp"

namespace tirsec {
namespace {

std::string count_line(std::size_t n, const char* noun) {
  return std::to_string(n) + " " + noun + (n == 1 ? "" : "s") + "\n";
}

std::string join(const std::vector<std::string>& xs, const char* sep, const char* empty) {
  if (xs.empty()) return empty;
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string distance(const Finding& f) {
  return f.control_distance ? std::to_string(*f.control_distance) : std::string("NA");
}

}  // namespace

std::string format_call_path(const CallGraph& cg, const std::vector<CallNode>& path) {
  std::vector<std::string> names;
  for (CallNode n : path) names.push_back(cg.names[n]);
  return join(names, "->", "");
}

std::string emit_taint_report(const Program& p, const RankedReport& r, ReportFormat fmt) {
  std::string out;
  if (fmt == ReportFormat::Tsv) {
    out = std::string(kTaintTsvHeader) + "\n";
    for (const auto& f : r.findings) {
      out += f.rule + "\t" + std::to_string(f.severity) + "\t" + format_site(p, f.source) + "\t" + format_site(p, f.sink) +
             "\t" + std::to_string(f.call_distance) + "\t" + distance(f) + "\t" + std::to_string(f.witness.size()) + "\n";
    }
    return out;
  }
  out = "tirsec app-taint report\n";
  std::size_t rank = 0;
  for (const auto& f : r.findings) {
    out += std::to_string(++rank) + ". " + f.rule + " severity=" + std::to_string(f.severity) + " " +
           format_site(p, f.source) + " -> " + format_site(p, f.sink) + " call_distance=" +
           std::to_string(f.call_distance) + " control_distance=" + distance(f) + "\n";
    for (const auto& h : f.witness) {
      out += "     " + format_taint_node(p, h.from) + " =" + std::string(hop_kind_name(h.kind)) + "=> " +
             format_taint_node(p, h.to) + "\n";
    }
  }
  if (r.findings.size() < r.total)
    out += std::to_string(r.total - r.findings.size()) + " more below cutoff " + std::to_string(*r.cutoff) + "\n";
  out += count_line(r.findings.size(), "finding");
  return out;
}

std::string emit_privilege_report(const CallGraph& cg, const ApiResult& r, ReportFormat fmt) {
  std::string out;
  if (fmt == ReportFormat::Tsv) {
    out = std::string(kPrivilegeTsvHeader) + "\n";
    for (const auto& v : r.violations) {
      out += v.trace.rule + "\t" + std::string(privilege_mode_name(v.mode)) + "\t" + format_call_path(cg, v.trace.path) +
             "\t" + join(v.trace.pvs, ",", "-") + "\t" + join(v.offending, ",", "-") + "\n";
    }
    return out;
  }
  out = "tirsec api-privilege report\n";
  std::size_t rank = 0;
  for (const auto& v : r.violations) {
    out += std::to_string(++rank) + ". " + v.trace.rule + " " + std::string(privilege_mode_name(v.mode)) + " source=" +
           cg.names[v.trace.path.front()] + " sink=" + cg.names[v.trace.path.back()] + "\n";
    out += "     path: " + format_call_path(cg, v.trace.path) + "\n";
    out += "     pvs: {" + join(v.trace.pvs, ", ", "") + "}";
    if (v.mode != PrivilegeMode::ReportUnchecked) out += " offending: {" + join(v.offending, ", ", "") + "}";
    out += "\n";
  }
  for (const auto& u : r.unchecked) {
    out += "unchecked source: " + u.rule + " " + u.source + " (" + count_line(u.paths, "path");
    out.back() = ')';
    out += "\n";
  }
  out += count_line(r.violations.size(), "violation");
  return out;
}

}  // namespace tirsec
