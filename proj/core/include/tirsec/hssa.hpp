#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tirsec/alias.hpp"
#include "tirsec/callgraph.hpp"
#include "tirsec/context.hpp"
#include "tirsec/side_effects.hpp"

namespace tirsec {

using HssaId = std::uint32_t;

enum class HssaKind : std::uint8_t { DPhi, UPhi, MergePhi, CallUPhi, CallDPhi };

std::string_view hssa_kind_name(HssaKind k);
inline bool is_heap_def(HssaKind k) { return k == HssaKind::DPhi || k == HssaKind::CallDPhi; }
inline bool is_heap_use(HssaKind k) { return k == HssaKind::UPhi || k == HssaKind::CallUPhi; }

/// One heap SSA pseudo-variable. Nodes of a call to a defined function carry
/// the callee's effect set instead of a single location; merges sit at the
/// head of their block (`index == kNone`).
struct HssaNode {
  HssaKind kind = HssaKind::DPhi;
  BlockId block = kNone;
  std::uint32_t index = kNone;
  ValueId base = kNone;  // kNone: any base
  HeapOffset offset;
  EffectSet effects;
  bool uses_effects = false;
  /// Heap use that may observe state written outside the function.
  bool external = false;
  /// Merge inputs, or the reaching defs of a use, ascending.
  std::vector<HssaId> inputs;
};

struct HssaEdge {
  HssaId from = 0;
  HssaId to = 0;
  bool must = false;

  auto operator<=>(const HssaEdge&) const = default;
};

struct HssaForm {
  FunctionId function = kNone;
  std::vector<HssaNode> nodes;
  /// Def-use edges sorted by (from, to).
  std::vector<HssaEdge> edges;
  /// Nodes attached to each instruction: [block][index].
  std::vector<std::vector<std::vector<HssaId>>> at;

  std::span<const HssaId> nodes_at(BlockId b, std::uint32_t i) const { return at[b][i]; }
  std::vector<HssaEdge> incoming(HssaId n) const;
};

/// Builds heap SSA for one function. `cg` supplies the callees of each call
/// site; `se` their transitive effects.
HssaForm build_hssa(const Program& p, FunctionId f, const FunctionContext& ctx, const SideEffectMap& se,
                    const CallGraph& cg);

std::vector<HssaForm> build_all_hssa(const Program& p, const std::vector<FunctionContext>& ctx,
                                     const SideEffectMap& se, const CallGraph& cg);

/// Def-use edges in deterministic order.
inline const std::vector<HssaEdge>& heap_def_use_chains(const HssaForm& h) { return h.edges; }

/// `Hn kind fn:block:idx base@offset <- [Hi(must), Hj]`, one node per line;
/// external uses end in ` ext`.
std::string dump_hssa(const Program& p, const HssaForm& h);

}  // namespace tirsec
