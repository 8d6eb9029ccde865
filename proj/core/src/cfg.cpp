#include "tirsec/cfg.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace tirsec {
namespace {

using Adj = std::vector<std::vector<NodeId>>;

std::vector<NodeId> postorder(const Adj& succs, NodeId root, const std::vector<bool>& allowed) {
  std::vector<NodeId> order;
  std::vector<bool> seen(succs.size(), false);
  std::vector<std::pair<NodeId, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen[root] = true;
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    if (i < succs[n].size()) {
      NodeId s = succs[n][i++];
      if (!seen[s] && allowed[s]) {
        seen[s] = true;
        stack.emplace_back(s, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  return order;
}

// Cooper, Harvey & Kennedy iterative dominators.
DominatorTree build_tree(const Adj& succs, const Adj& preds, NodeId root, const std::vector<bool>& allowed) {
  const std::size_t n = succs.size();
  DominatorTree t;
  t.root = root;
  t.idom.assign(n, kNone);
  t.children.assign(n, {});
  t.depth.assign(n, 0);

  std::vector<NodeId> po = postorder(succs, root, allowed);
  std::vector<std::uint32_t> po_index(n, kNone);
  for (std::uint32_t i = 0; i < po.size(); ++i) po_index[po[i]] = i;

  std::vector<NodeId> idom(n, kNone);
  idom[root] = root;
  auto intersect = [&](NodeId a, NodeId b) {
    while (a != b) {
      while (po_index[a] < po_index[b]) a = idom[a];
      while (po_index[b] < po_index[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = po.rbegin(); it != po.rend(); ++it) {
      NodeId b = *it;
      if (b == root) continue;
      NodeId new_idom = kNone;
      for (NodeId p : preds[b]) {
        if (po_index[p] == kNone || idom[p] == kNone) continue;
        new_idom = new_idom == kNone ? p : intersect(p, new_idom);
      }
      if (new_idom != kNone && idom[b] != new_idom) {
        idom[b] = new_idom;
        changed = true;
      }
    }
  }
  for (NodeId b = 0; b < n; ++b) {
    if (b != root && idom[b] != kNone) {
      t.idom[b] = idom[b];
      t.children[idom[b]].push_back(b);
    }
  }
  // Depths in a pre-order walk.
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    for (NodeId c : t.children[x]) {
      t.depth[c] = t.depth[x] + 1;
      stack.push_back(c);
    }
  }
  return t;
}

std::vector<bool> reachable_from(const Adj& succs, NodeId root) {
  std::vector<bool> seen(succs.size(), false);
  std::vector<NodeId> work{root};
  seen[root] = true;
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    for (NodeId s : succs[n]) {
      if (!seen[s]) {
        seen[s] = true;
        work.push_back(s);
      }
    }
  }
  return seen;
}

}  // namespace

bool Cfg::is_virtual_edge(NodeId from, NodeId to) const {
  return to == exit() && std::find(virtual_exit_edges.begin(), virtual_exit_edges.end(), from) != virtual_exit_edges.end();
}

std::vector<BlockId> Cfg::dead_blocks() const {
  std::vector<BlockId> out;
  for (BlockId b = 0; b < block_count; ++b) {
    if (!reachable[b]) out.push_back(b);
  }
  return out;
}

std::vector<BlockId> Cfg::live_preds(BlockId b) const {
  std::vector<BlockId> out;
  for (NodeId p : preds[b]) {
    if (reachable[p]) out.push_back(p);
  }
  return out;
}

Cfg build_cfg(const Function& f) {
  Cfg cfg;
  cfg.block_count = f.blocks.size();
  const std::size_t n = cfg.node_count();
  cfg.succs.assign(n, {});
  cfg.preds.assign(n, {});
  auto add_edge = [&](NodeId a, NodeId b) {
    if (std::find(cfg.succs[a].begin(), cfg.succs[a].end(), b) != cfg.succs[a].end()) return;
    cfg.succs[a].push_back(b);
    cfg.preds[b].push_back(a);
  };
  for (BlockId b = 0; b < f.blocks.size(); ++b) {
    const Instruction& term = f.blocks[b].terminator();
    switch (term.op) {
      case Opcode::Br:
      case Opcode::Jmp:
        for (BlockId t : term.targets) {
          if (t >= f.blocks.size()) throw std::invalid_argument("unknown label in function " + f.name);
          add_edge(b, t);
        }
        break;
      case Opcode::Ret: add_edge(b, cfg.exit()); break;
      default: throw std::invalid_argument("block without terminator in function " + f.name);
    }
  }
  cfg.reachable = reachable_from(cfg.succs, 0);
  cfg.reachable[cfg.exit()] = true;

  // Give exit-free loops a virtual exit edge at their outermost header, one
  // edge at a time, until every live block reaches the exit.
  std::vector<bool> all(n, true);
  for (;;) {
    std::vector<bool> reaches = reachable_from(cfg.preds, cfg.exit());
    std::vector<bool> stuck(n, false);
    bool any = false;
    for (BlockId b = 0; b < cfg.block_count; ++b) {
      if (cfg.reachable[b] && !reaches[b]) {
        stuck[b] = true;
        any = true;
      }
    }
    if (!any) break;

    // DFS from the entry; a back edge targets a node still on the stack.
    std::vector<std::uint8_t> state(n, 0);
    std::vector<std::pair<NodeId, std::size_t>> stack{{0, 0}};
    state[0] = 1;
    std::vector<NodeId> preorder{0};
    std::set<NodeId> headers;
    while (!stack.empty()) {
      auto& [x, i] = stack.back();
      if (i < cfg.succs[x].size()) {
        NodeId s = cfg.succs[x][i++];
        if (state[s] == 0) {
          state[s] = 1;
          preorder.push_back(s);
          stack.emplace_back(s, 0);
        } else if (state[s] == 1 && stuck[s]) {
          headers.insert(s);
        }
      } else {
        state[x] = 2;
        stack.pop_back();
      }
    }
    NodeId chosen = kNone;
    for (NodeId x : preorder) {
      if (headers.count(x)) {
        chosen = x;
        break;
      }
    }
    if (chosen == kNone) {
      for (NodeId x : preorder) {
        if (stuck[x]) {
          chosen = x;
          break;
        }
      }
    }
    add_edge(chosen, cfg.exit());
    cfg.virtual_exit_edges.push_back(chosen);
  }

  std::vector<NodeId> po = postorder(cfg.succs, 0, all);
  for (auto it = po.rbegin(); it != po.rend(); ++it) {
    if (*it != cfg.exit()) cfg.rpo.push_back(*it);
  }
  return cfg;
}

bool DominatorTree::dominates(NodeId a, NodeId b) const {
  if (!contains(a) || !contains(b)) return false;
  while (depth[b] > depth[a]) b = idom[b];
  return a == b;
}

DominatorTree compute_dominators(const Cfg& cfg) {
  return build_tree(cfg.succs, cfg.preds, 0, cfg.reachable);
}

DominatorTree compute_post_dominators(const Cfg& cfg) {
  return build_tree(cfg.preds, cfg.succs, cfg.exit(), cfg.reachable);
}

std::vector<std::vector<BlockId>> dominance_frontiers(const Cfg& cfg, const DominatorTree& dom) {
  std::vector<std::set<BlockId>> df(cfg.block_count);
  for (BlockId b = 0; b < cfg.block_count; ++b) {
    if (!cfg.reachable[b]) continue;
    auto preds = cfg.live_preds(b);
    if (preds.size() < 2) continue;
    for (BlockId p : preds) {
      NodeId runner = p;
      while (runner != kNone && runner != dom.idom[b]) {
        df[runner].insert(b);
        if (runner == dom.root) break;
        runner = dom.idom[runner];
      }
    }
  }
  std::vector<std::vector<BlockId>> out(cfg.block_count);
  for (BlockId b = 0; b < cfg.block_count; ++b) out[b].assign(df[b].begin(), df[b].end());
  return out;
}

std::vector<BlockId> iterated_dominance_frontier(const std::vector<std::vector<BlockId>>& df,
                                                 const std::vector<BlockId>& blocks) {
  std::set<BlockId> result;
  std::vector<BlockId> work(blocks.begin(), blocks.end());
  while (!work.empty()) {
    BlockId b = work.back();
    work.pop_back();
    for (BlockId y : df[b]) {
      if (result.insert(y).second) work.push_back(y);
    }
  }
  return {result.begin(), result.end()};
}

std::vector<bool> blocks_in_cycles(const Cfg& cfg) {
  // A block is on a cycle iff it can reach itself through at least one edge.
  std::vector<bool> out(cfg.block_count, false);
  for (BlockId b = 0; b < cfg.block_count; ++b) {
    if (!cfg.reachable[b]) continue;
    std::vector<bool> seen(cfg.node_count(), false);
    std::vector<NodeId> work(cfg.succs[b].begin(), cfg.succs[b].end());
    while (!work.empty()) {
      NodeId x = work.back();
      work.pop_back();
      if (x == b) {
        out[b] = true;
        break;
      }
      if (seen[x]) continue;
      seen[x] = true;
      for (NodeId s : cfg.succs[x]) work.push_back(s);
    }
  }
  return out;
}

std::uint32_t ControlDependence::region_distance(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t d = 0;
  while (region_depth[a] > region_depth[b]) {
    a = region_parent[a];
    ++d;
  }
  while (region_depth[b] > region_depth[a]) {
    b = region_parent[b];
    ++d;
  }
  while (a != b) {
    a = region_parent[a];
    b = region_parent[b];
    d += 2;
  }
  return d;
}

bool ControlDependence::region_is_ancestor(std::uint32_t ancestor, std::uint32_t r) const {
  while (region_depth[r] > region_depth[ancestor]) r = region_parent[r];
  return r == ancestor;
}

ControlDependence compute_control_dependence(const Function& f, const Cfg& cfg) {
  const std::size_t nb = cfg.block_count;
  DominatorTree pdom = compute_post_dominators(cfg);

  // (controller, successor position) pairs per dependent block.
  std::vector<std::set<std::pair<BlockId, std::uint32_t>>> deps(nb);
  for (BlockId a = 0; a < nb; ++a) {
    if (!cfg.reachable[a]) continue;
    const auto& succs = cfg.succs[a];
    if (succs.size() < 2) continue;
    for (std::uint32_t k = 0; k < succs.size(); ++k) {
      NodeId runner = succs[k];
      while (runner != pdom.idom[a] && runner != cfg.exit()) {
        deps[runner].insert({a, k});
        runner = pdom.idom[runner];
        if (runner == kNone) break;
      }
    }
  }

  ControlDependence cd;
  cd.controllers.assign(nb, {});
  for (BlockId b = 0; b < nb; ++b) {
    std::set<BlockId> c;
    for (const auto& [a, k] : deps[b]) c.insert(a);
    cd.controllers[b].assign(c.begin(), c.end());
  }

  cd.transitive_controllers.assign(nb, {});
  cd.predicates.assign(nb, {});
  for (BlockId b = 0; b < nb; ++b) {
    std::set<BlockId> seen;
    std::vector<BlockId> work(cd.controllers[b].begin(), cd.controllers[b].end());
    while (!work.empty()) {
      BlockId a = work.back();
      work.pop_back();
      if (!seen.insert(a).second) continue;
      for (BlockId up : cd.controllers[a]) work.push_back(up);
    }
    cd.transitive_controllers[b].assign(seen.begin(), seen.end());
    std::set<ValueId> preds;
    for (BlockId a : seen) {
      const Instruction& term = f.blocks[a].terminator();
      if (term.op == Opcode::Br) preds.insert(term.operands[0]);
    }
    cd.predicates[b].assign(preds.begin(), preds.end());
  }

  // Region tree. Regions are keyed by their dependence set; the tree parent of
  // a block is its first controller reached in a breadth-first walk from the
  // region-free blocks.
  std::map<std::set<std::pair<BlockId, std::uint32_t>>, std::uint32_t> region_ids;
  region_ids[{}] = 0;
  cd.region_of_block.assign(nb, 0);
  for (BlockId b = 0; b < nb; ++b) {
    if (!cfg.reachable[b]) continue;
    auto [it, inserted] = region_ids.emplace(deps[b], static_cast<std::uint32_t>(region_ids.size()));
    cd.region_of_block[b] = it->second;
  }
  const std::size_t nr = region_ids.size();
  cd.region_parent.assign(nr, 0);
  cd.region_depth.assign(nr, 0);

  std::vector<std::vector<BlockId>> controls(nb);
  for (BlockId b = 0; b < nb; ++b) {
    for (BlockId a : cd.controllers[b]) controls[a].push_back(b);
  }
  std::vector<std::uint32_t> depth(nb, kNone);
  std::vector<BlockId> parent(nb, kNone);
  std::deque<BlockId> queue;
  for (BlockId b = 0; b < nb; ++b) {
    if (cfg.reachable[b] && cd.controllers[b].empty()) {
      depth[b] = 0;
      queue.push_back(b);
    }
  }
  auto drain = [&] {
    while (!queue.empty()) {
      BlockId a = queue.front();
      queue.pop_front();
      for (BlockId b : controls[a]) {
        if (depth[b] != kNone) continue;
        depth[b] = depth[a] + 1;
        parent[b] = a;
        queue.push_back(b);
      }
    }
  };
  drain();
  // Dependence cycles not hanging off a region-free block attach to the root.
  for (BlockId b = 0; b < nb; ++b) {
    if (cfg.reachable[b] && depth[b] == kNone) {
      depth[b] = 1;
      queue.push_back(b);
      drain();
    }
  }
  std::vector<bool> assigned(nr, false);
  assigned[0] = true;
  for (BlockId b = 0; b < nb; ++b) {
    if (!cfg.reachable[b]) continue;
    std::uint32_t r = cd.region_of_block[b];
    if (assigned[r]) continue;
    assigned[r] = true;
    cd.region_depth[r] = depth[b];
    cd.region_parent[r] = parent[b] == kNone ? 0 : cd.region_of_block[parent[b]];
  }
  // Break parent cycles (possible for dependence cycles inside loops), then
  // derive depths from the parent links.
  for (std::uint32_t r = 1; r < nr; ++r) {
    std::set<std::uint32_t> visited;
    std::uint32_t x = r;
    while (x != 0 && visited.insert(x).second) x = cd.region_parent[x];
    if (x != 0) cd.region_parent[r] = 0;
  }
  for (std::uint32_t r = 1; r < nr; ++r) {
    std::uint32_t d = 0;
    for (std::uint32_t x = r; x != 0; x = cd.region_parent[x]) ++d;
    cd.region_depth[r] = d;
  }
  return cd;
}

}  // namespace tirsec

namespace tirsec {

std::string dump_cfg(const Function& f, const Cfg& cfg) {
  std::string out = "func " + f.name + "\n";
  for (BlockId b = 0; b < cfg.block_count; ++b) {
    out += "  " + f.blocks[b].label + " ->";
    for (NodeId s : cfg.succs[b]) {
      if (s == cfg.exit()) {
        out += cfg.is_virtual_edge(b, s) ? " exit(virtual)" : " exit";
      } else {
        out += " " + f.blocks[s].label;
      }
    }
    if (!cfg.reachable[b]) out += " (dead)";
    out += "\n";
  }
  return out;
}

}  // namespace tirsec
