#include "tirsec/ranking.hpp"

#include <algorithm>
#include <tuple>

namespace tirsec {

int call_distance(const Finding& f) {
  return std::any_of(f.witness.begin(), f.witness.end(), [](const Hop& h) { return h.kind == HopKind::Call; }) ? 1 : 0;
}

std::optional<std::uint32_t> control_distance(const Finding& f, const std::vector<FunctionContext>& ctx) {
  if (call_distance(f) != 0 || f.source.function != f.sink.function) return std::nullopt;
  const ControlDependence& cd = ctx[f.sink.function].cd;
  BlockId src = f.source.is_param() ? 0 : f.source.block;
  return cd.region_distance(cd.region_of_block[src], cd.region_of_block[f.sink.block]);
}

void annotate_metrics(std::vector<Finding>& fs, const std::vector<FunctionContext>& ctx) {
  for (auto& f : fs) {
    f.call_distance = call_distance(f);
    f.control_distance = control_distance(f, ctx);
  }
}

bool rank_before(const Finding& a, const Finding& b) {
  auto cd = [](const Finding& f) { return f.control_distance ? std::make_pair(0, *f.control_distance) : std::make_pair(1, 0u); };
  return std::make_tuple(-a.severity, a.call_distance, cd(a), a.source, a.sink, a.rule) <
         std::make_tuple(-b.severity, b.call_distance, cd(b), b.source, b.sink, b.rule);
}

RankedReport rank_findings(std::vector<Finding> fs, std::optional<std::size_t> cutoff) {
  RankedReport r;
  r.total = fs.size();
  r.cutoff = cutoff;
  std::stable_sort(fs.begin(), fs.end(), rank_before);
  if (cutoff && fs.size() > *cutoff) fs.resize(*cutoff);
  r.findings = std::move(fs);
  return r;
}

}  // namespace tirsec
