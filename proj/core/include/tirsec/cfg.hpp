#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tirsec/ir.hpp"

namespace tirsec {

using NodeId = std::uint32_t;

/// Per-function control-flow graph. Nodes `0..block_count-1` are the blocks
/// in declaration order; node `block_count` is the synthetic exit. Every `ret`
/// has an edge to the exit, and each header of an exit-free loop receives one
/// virtual edge to the exit so that the exit post-dominates every live node.
struct Cfg {
  std::size_t block_count = 0;
  std::vector<std::vector<NodeId>> succs;
  std::vector<std::vector<NodeId>> preds;
  std::vector<BlockId> virtual_exit_edges;
  std::vector<bool> reachable;
  /// Reachable blocks (not the exit) in reverse post-order from the entry.
  std::vector<BlockId> rpo;

  NodeId exit() const noexcept { return static_cast<NodeId>(block_count); }
  std::size_t node_count() const noexcept { return block_count + 1; }
  bool is_virtual_edge(NodeId from, NodeId to) const;
  std::vector<BlockId> dead_blocks() const;
  /// Predecessors that are reachable from the entry.
  std::vector<BlockId> live_preds(BlockId b) const;
};

Cfg build_cfg(const Function& f);

/// Immediate-dominator tree over the nodes reachable from `root`.
struct DominatorTree {
  NodeId root = 0;
  std::vector<NodeId> idom;  // kNone for the root and for nodes not in the tree
  std::vector<std::vector<NodeId>> children;
  std::vector<std::uint32_t> depth;

  bool contains(NodeId n) const { return n == root || idom[n] != kNone; }
  bool dominates(NodeId a, NodeId b) const;
};

DominatorTree compute_dominators(const Cfg& cfg);
DominatorTree compute_post_dominators(const Cfg& cfg);

/// Dominance frontier of every node (forward dominance).
std::vector<std::vector<BlockId>> dominance_frontiers(const Cfg& cfg, const DominatorTree& dom);
std::vector<BlockId> iterated_dominance_frontier(const std::vector<std::vector<BlockId>>& df,
                                                 const std::vector<BlockId>& blocks);

/// Blocks that lie on some CFG cycle.
std::vector<bool> blocks_in_cycles(const Cfg& cfg);

/// Control dependence from post-dominance frontiers, plus the region tree used
/// for control-distance metrics.
struct ControlDependence {
  /// Direct controllers of each block: A is listed for B when one successor of
  /// A always reaches B and another may bypass it.
  std::vector<std::vector<BlockId>> controllers;
  /// Transitive closure of `controllers`.
  std::vector<std::vector<BlockId>> transitive_controllers;
  /// Branch predicates (br conditions) of the transitive controllers; these are
  /// the pseudo-use operands for instructions in the block.
  std::vector<std::vector<ValueId>> predicates;

  /// Region tree: blocks sharing the same set of (controller, successor)
  /// dependences form one region; region 0 is the virtual root.
  std::vector<std::uint32_t> region_of_block;
  std::vector<std::uint32_t> region_parent;
  std::vector<std::uint32_t> region_depth;

  std::uint32_t block_depth(BlockId b) const { return region_depth[region_of_block[b]]; }
  /// Path length between two regions in the region tree.
  std::uint32_t region_distance(std::uint32_t a, std::uint32_t b) const;
  bool region_is_ancestor(std::uint32_t ancestor, std::uint32_t r) const;
};

ControlDependence compute_control_dependence(const Function& f, const Cfg& cfg);

}  // namespace tirsec

namespace tirsec {

/// `LABEL -> SUCC...` per block with `exit` for the synthetic exit node;
/// virtual exit edges print as `exit(virtual)` and dead blocks are marked.
std::string dump_cfg(const Function& f, const Cfg& cfg);

}  // namespace tirsec
