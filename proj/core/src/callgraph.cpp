#include "tirsec/callgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>

#include "tirsec/class_types.hpp"

namespace tirsec {

std::optional<CallNode> CallGraph::find(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<CallNode>(it - names.begin());
}

std::span<const CallEdge> CallGraph::edges_at(const Site& s) const {
  auto lo = std::lower_bound(edges.begin(), edges.end(), s, [](const CallEdge& e, const Site& x) { return e.site < x; });
  auto hi = lo;
  while (hi != edges.end() && hi->site == s) ++hi;
  return {lo, hi};
}

bool CallGraph::has_edge(const Site& s, CallNode callee) const {
  for (const auto& e : edges_at(s)) {
    if (e.callee == callee) return true;
  }
  return false;
}

void CallGraph::finalize() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  succ_.assign(names.size(), {});
  for (const auto& e : edges) succ_[e.site.function].push_back(e.callee);
  for (auto& s : succ_) {
    std::sort(s.begin(), s.end(), [&](CallNode a, CallNode b) { return names[a] < names[b]; });
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

std::vector<FunctionId> entry_functions(const Program& p, std::vector<Diagnostic>* diags) {
  std::vector<FunctionId> out;
  for (FunctionId i = 0; i < p.functions.size(); ++i) {
    if (p.functions[i].is_entry || p.functions[i].is_event) out.push_back(i);
  }
  if (out.empty() && diags) diags->push_back({Severity::Warning, "", "program has no entry or event functions", 0});
  return out;
}

std::vector<FunctionId> address_taken_with_arity(const Program& p, std::size_t arity) {
  std::vector<bool> taken(p.functions.size(), false);
  for (const auto& f : p.functions) {
    for (const auto& b : f.blocks) {
      for (const auto& inst : b.instructions) {
        if (inst.op == Opcode::FuncAddr) taken[*p.find_function(inst.symbol)] = true;
      }
    }
  }
  std::vector<FunctionId> out;
  for (FunctionId i = 0; i < p.functions.size(); ++i) {
    if (taken[i] && p.functions[i].params.size() == arity) out.push_back(i);
  }
  return out;
}

namespace {

using VcallClasses = std::function<std::vector<ClassId>(FunctionId, ValueId)>;

CallGraph make_nodes(const Program& p) {
  CallGraph cg;
  cg.defined_count = p.functions.size();
  for (const auto& f : p.functions) cg.names.push_back(f.name);
  std::unordered_map<std::string, bool> seen;
  for (const auto& f : p.functions) {
    for (const auto& b : f.blocks) {
      for (const auto& inst : b.instructions) {
        if (inst.op == Opcode::Call && !p.find_function(inst.symbol) && seen.emplace(inst.symbol, true).second)
          cg.names.push_back(inst.symbol);
      }
    }
  }
  cg.roots = entry_functions(p);
  cg.reachable.assign(cg.names.size(), false);
  return cg;
}

void add_function_edges(CallGraph& cg, const Program& p, const ClassHierarchy& h, const std::vector<FunctionContext>& ctx,
                        FunctionId fid, const VcallClasses& vcall_classes,
                        std::unordered_map<std::size_t, std::vector<FunctionId>>& arity_cache) {
  const Function& f = p.functions[fid];
  const Cfg& cfg = ctx[fid].cfg;
  const PointsToMap& pts = ctx[fid].alias.points_to();
  for (BlockId b : cfg.rpo) {
    const auto& insts = f.blocks[b].instructions;
    for (std::uint32_t i = 0; i < insts.size(); ++i) {
      const Instruction& inst = insts[i];
      Site site{fid, b, i};
      auto add = [&](CallNode n) { cg.edges.push_back(CallEdge{site, n}); };
      switch (inst.op) {
        case Opcode::Call:
          add(*cg.find(inst.symbol));
          break;
        case Opcode::VCall:
          for (ClassId c : vcall_classes(fid, inst.operands[0])) {
            if (const std::string* fn = h.lookup(c, inst.imm)) add(*p.find_function(*fn));
          }
          break;
        case Opcode::ICall: {
          ValueId fp = inst.operands[0];
          for (std::uint32_t obj : pts.of(fp)) {
            if (obj == kUnknownObject) continue;
            const AbstractObject& o = pts.objects[obj];
            if (o.kind == Opcode::FuncAddr) add(*p.find_function(o.symbol));
          }
          if (pts.has_unknown(fp)) {
            cg.unresolved_icalls.insert(site);
            std::size_t arity = inst.operands.size() - 1;
            auto it = arity_cache.find(arity);
            if (it == arity_cache.end()) it = arity_cache.emplace(arity, address_taken_with_arity(p, arity)).first;
            for (FunctionId g : it->second) add(g);
          }
          break;
        }
        default: break;
      }
    }
  }
}

CallGraph build(const Program& p, const ClassHierarchy& h, const std::vector<FunctionContext>& ctx,
                const VcallClasses& vcall_classes, bool all_functions) {
  CallGraph cg = make_nodes(p);
  std::unordered_map<std::size_t, std::vector<FunctionId>> arity_cache;
  if (all_functions) {
    for (FunctionId f = 0; f < p.functions.size(); ++f) add_function_edges(cg, p, h, ctx, f, vcall_classes, arity_cache);
  } else {
    std::deque<FunctionId> work(cg.roots.begin(), cg.roots.end());
    std::vector<bool> queued(p.functions.size(), false);
    for (FunctionId r : cg.roots) queued[r] = true;
    while (!work.empty()) {
      FunctionId f = work.front();
      work.pop_front();
      std::size_t first = cg.edges.size();
      add_function_edges(cg, p, h, ctx, f, vcall_classes, arity_cache);
      for (std::size_t e = first; e < cg.edges.size(); ++e) {
        CallNode c = cg.edges[e].callee;
        if (!cg.is_external(c) && !queued[c]) {
          queued[c] = true;
          work.push_back(c);
        }
      }
    }
  }
  cg.finalize();

  std::deque<CallNode> work;
  for (FunctionId r : cg.roots) {
    cg.reachable[r] = true;
    work.push_back(r);
  }
  while (!work.empty()) {
    CallNode n = work.front();
    work.pop_front();
    for (CallNode c : cg.callees(n)) {
      if (!cg.reachable[c]) {
        cg.reachable[c] = true;
        work.push_back(c);
      }
    }
  }
  return cg;
}

}  // namespace

CallGraph build_cha_call_graph(const Program& p, const ClassHierarchy& h, const std::vector<FunctionContext>& ctx,
                               bool all_functions) {
  std::vector<ClassId> all(h.size());
  for (ClassId c = 0; c < h.size(); ++c) all[c] = c;
  return build(p, h, ctx, [&](FunctionId, ValueId) { return all; }, all_functions);
}

CallGraph build_call_graph(const Program& p, const ClassHierarchy& h, const TypeMap& types,
                           const std::vector<FunctionContext>& ctx) {
  return build(
      p, h, ctx, [&](FunctionId f, ValueId v) { return types.of(f, v).members(); }, false);
}

std::vector<std::vector<CallNode>> enumerate_paths(const CallGraph& cg, CallNode from, CallNode to, std::size_t bound) {
  std::vector<std::vector<CallNode>> out;
  std::vector<CallNode> path{from};
  std::vector<bool> on_path(cg.node_count(), false);
  on_path[from] = true;
  std::function<void(CallNode)> dfs = [&](CallNode n) {
    if (n == to) {
      out.push_back(path);
      return;
    }
    if (path.size() - 1 >= bound) return;
    for (CallNode c : cg.callees(n)) {
      if (on_path[c]) continue;
      on_path[c] = true;
      path.push_back(c);
      dfs(c);
      path.pop_back();
      on_path[c] = false;
    }
  };
  dfs(from);
  return out;
}

std::string dump_call_graph(const Program& p, const CallGraph& cg) {
  std::string out;
  for (const auto& e : cg.edges) {
    out += cg.names[e.site.function] + " -> " + cg.names[e.callee] + " @ " + format_site(p, e.site) + "\n";
  }
  return out;
}

}  // namespace tirsec
