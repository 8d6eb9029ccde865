#pragma once

#include <vector>

#include "tirsec/alias.hpp"
#include "tirsec/cfg.hpp"
#include "tirsec/ir.hpp"

namespace tirsec {

/// Per-function structures every whole-program analysis needs.
struct FunctionContext {
  explicit FunctionContext(const Function& f);

  Cfg cfg;
  DominatorTree dom;
  ControlDependence cd;
  AliasOracle alias;
};

std::vector<FunctionContext> build_contexts(const Program& p);

}  // namespace tirsec
