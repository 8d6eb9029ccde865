#include "tirsec_testkit/oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace tirsec::testkit {
namespace {

// Node key: (function, is heap node, id).
using Node = std::tuple<FunctionId, bool, std::uint32_t>;

Node value_node(FunctionId f, ValueId v) { return {f, false, v}; }
Node heap_node(FunctionId f, std::uint32_t h) { return {f, true, h}; }

std::vector<std::vector<ValueId>> pseudo_operands(const Function& fn, const Cfg& cfg) {
  auto direct = direct_control_dependence(cfg);
  std::vector<std::vector<ValueId>> out(fn.blocks.size());
  for (BlockId b = 0; b < fn.blocks.size(); ++b) {
    std::set<BlockId> seen;
    std::vector<BlockId> work = direct[b];
    while (!work.empty()) {
      BlockId a = work.back();
      work.pop_back();
      if (!seen.insert(a).second) continue;
      work.insert(work.end(), direct[a].begin(), direct[a].end());
    }
    std::set<ValueId> preds;
    for (BlockId a : seen) {
      const Instruction& t = fn.blocks[a].instructions.back();
      if (t.op == Opcode::Br) preds.insert(t.operands[0]);
    }
    out[b].assign(preds.begin(), preds.end());
  }
  return out;
}

std::vector<std::string> callees_at(const Analysis& a, const Site& s, const Instruction& inst) {
  if (inst.op == Opcode::Call) return {inst.symbol};
  std::vector<std::string> out;
  for (const auto& e : a.call_graph().edges) {
    if (e.site == s) out.push_back(a.call_graph().names[e.callee]);
  }
  return out;
}

std::vector<ValueId> call_args(const Instruction& inst) {
  if (inst.op == Opcode::ICall) return {inst.operands.begin() + 1, inst.operands.end()};
  return inst.operands;
}

}  // namespace

std::vector<std::vector<BlockId>> direct_control_dependence(const Cfg& cfg) {
  const std::size_t n = cfg.node_count();
  const NodeId exit = cfg.exit();
  // reaches_exit_without[b][x]: x reaches the exit on a path avoiding b.
  std::vector<std::vector<bool>> avoid(n, std::vector<bool>(n, false));
  for (NodeId b = 0; b < n; ++b) {
    if (b == exit) continue;
    std::deque<NodeId> q{exit};
    avoid[b][exit] = true;
    while (!q.empty()) {
      NodeId x = q.front();
      q.pop_front();
      for (NodeId pr : cfg.preds[x]) {
        if (pr == b || avoid[b][pr]) continue;
        avoid[b][pr] = true;
        q.push_back(pr);
      }
    }
  }
  auto postdom = [&](NodeId b, NodeId x) { return b == x || (b != exit && x != exit && !avoid[b][x]); };

  std::vector<std::vector<BlockId>> out(cfg.block_count);
  for (BlockId b = 0; b < cfg.block_count; ++b) {
    if (!cfg.reachable[b]) continue;
    for (BlockId a = 0; a < cfg.block_count; ++a) {
      if (!cfg.reachable[a]) continue;
      bool strict = a != b && postdom(b, a);
      if (strict) continue;
      for (NodeId s : cfg.succs[a]) {
        if (postdom(b, s)) {
          out[b].push_back(a);
          break;
        }
      }
    }
  }
  return out;
}

std::set<FlowKey> oracle_taint(const Analysis& a, const RuleSet& rs, bool implicit_flows) {
  const Program& p = a.program;
  const CallGraph& cg = a.call_graph();
  std::map<Node, std::set<Node>> succ;
  auto edge = [&](Node from, Node to) { succ[from].insert(to); };

  std::vector<std::vector<std::vector<ValueId>>> pseudo(p.functions.size());
  for (FunctionId f = 0; f < p.functions.size(); ++f) {
    if (implicit_flows) pseudo[f] = pseudo_operands(p.functions[f], a.contexts[f].cfg);
  }

  for (FunctionId f = 0; f < p.functions.size(); ++f) {
    if (!cg.reachable[f]) continue;
    const Function& fn = p.functions[f];
    const HssaForm& hs = a.hssa[f];
    const Cfg& cfg = a.contexts[f].cfg;
    for (const auto& e : hs.edges) edge(heap_node(f, e.from), heap_node(f, e.to));

    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      if (!cfg.reachable[b]) continue;
      for (std::uint32_t i = 0; i < fn.blocks[b].instructions.size(); ++i) {
        const Instruction& inst = fn.blocks[b].instructions[i];
        const auto& hn = hs.at[b][i];
        Site site{f, b, i};

        if (implicit_flows) {
          bool affected = inst.result != kNone || inst.op == Opcode::Store || inst.op == Opcode::StoreIdx ||
                          inst.op == Opcode::Call || inst.op == Opcode::VCall || inst.op == Opcode::ICall;
          if (affected) {
            for (ValueId c : pseudo[f][b]) {
              if (inst.result != kNone) edge(value_node(f, c), value_node(f, inst.result));
              for (auto h : hn) {
                auto k = hs.nodes[h].kind;
                if (k == HssaKind::DPhi || k == HssaKind::CallDPhi) edge(value_node(f, c), heap_node(f, h));
              }
            }
          }
        }

        switch (inst.op) {
          case Opcode::Copy:
          case Opcode::Phi:
          case Opcode::Binop:
            for (ValueId v : inst.operands) edge(value_node(f, v), value_node(f, inst.result));
            break;
          case Opcode::Load:
          case Opcode::LoadIdx:
            for (auto h : hn) edge(heap_node(f, h), value_node(f, inst.result));
            break;
          case Opcode::Store:
          case Opcode::StoreIdx:
            for (auto h : hn) edge(value_node(f, inst.operands.back()), heap_node(f, h));
            break;
          case Opcode::Call:
          case Opcode::VCall:
          case Opcode::ICall: {
            auto args = call_args(inst);
            if (inst.op == Opcode::Call && !p.find_function(inst.symbol)) {
              for (ValueId x : args) {
                if (inst.result != kNone) edge(value_node(f, x), value_node(f, inst.result));
                for (auto h : hn) {
                  if (hs.nodes[h].kind == HssaKind::CallDPhi && hs.nodes[h].base != kNone)
                    edge(value_node(f, x), heap_node(f, h));
                }
              }
              break;
            }
            for (const auto& e : cg.edges) {
              if (e.site != site || cg.is_external(e.callee)) continue;
              FunctionId g = e.callee;
              const Function& gf = p.functions[g];
              const HssaForm& gh = a.hssa[g];
              for (std::size_t k = 0; k < args.size() && k < gf.params.size(); ++k)
                edge(value_node(f, args[k]), value_node(g, gf.params[k]));
              if (inst.result != kNone) {
                for (BlockId gb = 0; gb < gf.blocks.size(); ++gb) {
                  if (!a.contexts[g].cfg.reachable[gb]) continue;
                  const Instruction& t = gf.blocks[gb].instructions.back();
                  if (t.op == Opcode::Ret && !t.operands.empty())
                    edge(value_node(g, t.operands[0]), value_node(f, inst.result));
                }
              }
              for (auto h : hn) {
                const HssaNode& mine = hs.nodes[h];
                for (std::uint32_t m = 0; m < gh.nodes.size(); ++m) {
                  const HssaNode& theirs = gh.nodes[m];
                  if (mine.kind == HssaKind::CallUPhi && theirs.external &&
                      (theirs.kind == HssaKind::UPhi || theirs.kind == HssaKind::CallUPhi))
                    edge(heap_node(f, h), heap_node(g, m));
                  if (mine.kind == HssaKind::CallDPhi && mine.base == kNone &&
                      (theirs.kind == HssaKind::DPhi || theirs.kind == HssaKind::CallDPhi))
                    edge(heap_node(g, m), heap_node(f, h));
                }
              }
            }
            break;
          }
          default: break;
        }
      }
    }
  }

  // Sources and sinks.
  std::map<std::pair<std::size_t, Site>, std::set<Node>> seeds;
  std::vector<std::tuple<std::size_t, Site, Node>> sinks;
  for (std::size_t r = 0; r < rs.taint_rules.size(); ++r) {
    const TaintRule& rule = rs.taint_rules[r];
    for (FunctionId f = 0; f < p.functions.size(); ++f) {
      if (!cg.reachable[f]) continue;
      const Function& fn = p.functions[f];
      if (rule.source.event && fn.is_event && fn.name == rule.source.function && !rule.source.is_return &&
          rule.source.param < fn.params.size())
        seeds[{r, Site{f, kParamBlock, rule.source.param}}].insert(value_node(f, fn.params[rule.source.param]));
      for (BlockId b = 0; b < fn.blocks.size(); ++b) {
        if (!a.contexts[f].cfg.reachable[b]) continue;
        for (std::uint32_t i = 0; i < fn.blocks[b].instructions.size(); ++i) {
          const Instruction& inst = fn.blocks[b].instructions[i];
          if (inst.op != Opcode::Call && inst.op != Opcode::VCall && inst.op != Opcode::ICall) continue;
          Site site{f, b, i};
          auto names = callees_at(a, site, inst);
          auto args = call_args(inst);
          auto named = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
          if (!rule.source.event && named(rule.source.function)) {
            if (rule.source.is_return && inst.result != kNone) {
              seeds[{r, site}].insert(value_node(f, inst.result));
            } else if (!rule.source.is_return && rule.source.param < args.size()) {
              ValueId x = args[rule.source.param];
              auto& s = seeds[{r, site}];
              s.insert(value_node(f, x));
              for (auto h : a.hssa[f].at[b][i]) {
                const HssaNode& node = a.hssa[f].nodes[h];
                if (node.kind == HssaKind::CallDPhi && node.base == x) s.insert(heap_node(f, h));
              }
            }
          }
          for (const auto& sk : rule.sinks) {
            if (named(sk.function) && sk.param < args.size()) sinks.emplace_back(r, site, value_node(f, args[sk.param]));
          }
        }
      }
    }
  }

  std::set<FlowKey> out;
  for (const auto& [key, start] : seeds) {
    std::set<Node> seen(start.begin(), start.end());
    std::deque<Node> q(start.begin(), start.end());
    while (!q.empty()) {
      Node n = q.front();
      q.pop_front();
      auto it = succ.find(n);
      if (it == succ.end()) continue;
      for (const Node& m : it->second) {
        if (seen.insert(m).second) q.push_back(m);
      }
    }
    for (const auto& [r, site, node] : sinks) {
      if (r == key.first && seen.count(node)) out.emplace(rs.taint_rules[r].name, key.second, site);
    }
  }
  return out;
}

std::set<FlowKey> engine_flows(const std::vector<Finding>& fs) {
  std::set<FlowKey> out;
  for (const auto& f : fs) out.emplace(f.rule, f.source, f.sink);
  return out;
}

std::set<std::pair<Site, Site>> reaching_heap_defs(const Program& p, FunctionId f, const FunctionContext& ctx) {
  const Function& fn = p.functions[f];
  const Cfg& cfg = ctx.cfg;
  auto location = [](const Instruction& inst) {
    bool idx = inst.op == Opcode::LoadIdx || inst.op == Opcode::StoreIdx;
    return HeapLocation{inst.operands[0], idx ? HeapOffset::dynamic(inst.operands[1]) : HeapOffset::fixed(inst.imm)};
  };
  auto is_store = [](const Instruction& i) { return i.op == Opcode::Store || i.op == Opcode::StoreIdx; };
  auto is_load = [](const Instruction& i) { return i.op == Opcode::Load || i.op == Opcode::LoadIdx; };

  std::set<std::pair<Site, Site>> out;
  for (BlockId sb = 0; sb < fn.blocks.size(); ++sb) {
    if (!cfg.reachable[sb]) continue;
    for (std::uint32_t si = 0; si < fn.blocks[sb].instructions.size(); ++si) {
      const Instruction& def = fn.blocks[sb].instructions[si];
      if (!is_store(def)) continue;
      HeapLocation dl = location(def);
      // Walk instructions in order; returns false when the def is killed.
      auto scan = [&](BlockId b, std::uint32_t from) {
        const auto& insts = fn.blocks[b].instructions;
        for (std::uint32_t i = from; i < insts.size(); ++i) {
          const Instruction& inst = insts[i];
          if (is_load(inst) && ctx.alias.may_alias(dl, location(inst))) out.insert({Site{f, sb, si}, Site{f, b, i}});
          if (is_store(inst) && ctx.alias.must_alias(location(inst), dl)) return false;
        }
        return true;
      };
      std::vector<bool> visited(fn.blocks.size(), false);
      std::vector<BlockId> work;
      if (scan(sb, si + 1)) {
        for (NodeId s : cfg.succs[sb])
          if (s < fn.blocks.size()) work.push_back(s);
      }
      while (!work.empty()) {
        BlockId b = work.back();
        work.pop_back();
        if (visited[b]) continue;
        visited[b] = true;
        if (!scan(b, 0)) continue;
        for (NodeId s : cfg.succs[b])
          if (s < fn.blocks.size()) work.push_back(s);
      }
    }
  }
  return out;
}

std::set<std::vector<CallNode>> all_call_paths(const CallGraph& cg, CallNode from, CallNode to, std::size_t bound) {
  std::map<CallNode, std::set<CallNode>> adj;
  for (const auto& e : cg.edges) adj[e.site.function].insert(e.callee);
  std::set<std::vector<CallNode>> out;
  std::vector<CallNode> path{from};
  std::set<CallNode> on_path{from};
  auto dfs = [&](auto&& self, CallNode n) -> void {
    if (n == to) {
      out.insert(path);
      return;
    }
    if (path.size() - 1 >= bound) return;
    for (CallNode m : adj[n]) {
      if (on_path.count(m)) continue;
      path.push_back(m);
      on_path.insert(m);
      self(self, m);
      on_path.erase(m);
      path.pop_back();
    }
  };
  dfs(dfs, from);
  return out;
}

std::set<std::string> path_privileges(const Program& p, const CallGraph& cg, const std::vector<CallNode>& path,
                                      const std::string& checker) {
  std::set<std::string> out;
  for (CallNode n : path) {
    if (cg.is_external(n)) continue;
    const Function& fn = p.functions[n];
    for (const auto& blk : fn.blocks) {
      for (const auto& inst : blk.instructions) {
        if (inst.op != Opcode::Call || inst.symbol != checker) continue;
        if (inst.operands.empty()) {
          out.insert("UNKNOWN_PRIV");
          continue;
        }
        ValueId v = inst.operands[0];
        std::string name = "UNKNOWN_PRIV";
        for (int guard = 0; guard < 64 && fn.defs[v].defined() && !fn.defs[v].is_param(); ++guard) {
          const Instruction& d = fn.instruction_at(fn.defs[v]);
          if (d.op == Opcode::ConstStr) {
            name = d.symbol;
            break;
          }
          if (d.op != Opcode::Copy) break;
          v = d.operands[0];
        }
        out.insert(name);
      }
    }
  }
  return out;
}

}  // namespace tirsec::testkit
