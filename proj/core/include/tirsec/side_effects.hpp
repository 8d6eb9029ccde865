#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tirsec/alias.hpp"
#include "tirsec/callgraph.hpp"
#include "tirsec/context.hpp"

namespace tirsec {

/// Heap offsets touched by a function: static offsets, "some dynamic index",
/// or everything (top).
struct EffectSet {
  std::set<std::int64_t> offsets;
  bool dynamic = false;
  bool top = false;

  bool empty() const noexcept { return offsets.empty() && !dynamic && !top; }
  /// Returns true when the set grew.
  bool merge(const EffectSet& other);
  void add(const HeapOffset& off);
  bool may_touch(const HeapOffset& off) const;
  bool intersects(const EffectSet& other) const;
  /// `{0,8}`, `{8,[]}` with a dynamic component, `*` for top.
  std::string to_string() const;
  bool operator==(const EffectSet&) const = default;
};

struct FunctionEffects {
  EffectSet loads;
  EffectSet stores;
};

/// Transitive load/store effects of every defined function.
struct SideEffectMap {
  std::vector<FunctionEffects> functions;

  const FunctionEffects& of(FunctionId f) const { return functions[f]; }
  /// Union over the defined callees at a call site; top for an unresolved icall.
  /// External callees are not included (see HSSA external call nodes).
  FunctionEffects at_call(const CallGraph& cg, const Site& site) const;
};

/// Closes the local effects of each function over `cg`. Calls to external
/// functions with address-valued arguments count as a store to any offset;
/// unresolved icalls count as top for both loads and stores.
SideEffectMap compute_side_effects(const Program& p, const CallGraph& cg, const std::vector<FunctionContext>& ctx);

/// Convenience: builds contexts, the class hierarchy and the conservative
/// call graph first.
SideEffectMap compute_side_effects(const Program& p);

}  // namespace tirsec
