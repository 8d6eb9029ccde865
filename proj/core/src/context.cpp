#include "tirsec/context.hpp"

namespace tirsec {

FunctionContext::FunctionContext(const Function& f)
    : cfg(build_cfg(f)),
      dom(compute_dominators(cfg)),
      cd(compute_control_dependence(f, cfg)),
      alias(f, cfg) {}

std::vector<FunctionContext> build_contexts(const Program& p) {
  std::vector<FunctionContext> out;
  out.reserve(p.functions.size());
  for (const auto& f : p.functions) out.emplace_back(f);
  return out;
}

}  // namespace tirsec
