#include "tirsec/side_effects.hpp"

#include <algorithm>
#include <deque>

namespace tirsec {

bool EffectSet::merge(const EffectSet& other) {
  bool grew = false;
  if (other.top && !top) top = grew = true;
  if (other.dynamic && !dynamic) dynamic = grew = true;
  for (auto k : other.offsets) grew |= offsets.insert(k).second;
  return grew;
}

void EffectSet::add(const HeapOffset& off) {
  switch (off.kind) {
    case HeapOffset::Kind::Static: offsets.insert(off.value); break;
    case HeapOffset::Kind::Dynamic: dynamic = true; break;
    case HeapOffset::Kind::Any: top = true; break;
  }
}

bool EffectSet::may_touch(const HeapOffset& off) const {
  if (empty()) return false;
  if (top || dynamic || off.kind != HeapOffset::Kind::Static) return true;
  return offsets.count(off.value) != 0;
}

bool EffectSet::intersects(const EffectSet& other) const {
  if (empty() || other.empty()) return false;
  if (top || dynamic || other.top || other.dynamic) return true;
  for (auto k : offsets) {
    if (other.offsets.count(k)) return true;
  }
  return false;
}

std::string EffectSet::to_string() const {
  if (top) return "*";
  std::string out = "{";
  bool first = true;
  for (auto k : offsets) {
    if (!first) out += ",";
    out += std::to_string(k);
    first = false;
  }
  if (dynamic) out += first ? "[]" : ",[]";
  return out + "}";
}

FunctionEffects SideEffectMap::at_call(const CallGraph& cg, const Site& site) const {
  FunctionEffects out;
  for (const auto& e : cg.edges_at(site)) {
    if (cg.is_external(e.callee)) continue;
    out.loads.merge(functions[e.callee].loads);
    out.stores.merge(functions[e.callee].stores);
  }
  if (cg.unresolved_icalls.count(site)) {
    out.loads.top = true;
    out.stores.top = true;
  }
  return out;
}

SideEffectMap compute_side_effects(const Program& p, const CallGraph& cg, const std::vector<FunctionContext>& ctx) {
  SideEffectMap m;
  m.functions.assign(p.functions.size(), {});
  for (FunctionId fid = 0; fid < p.functions.size(); ++fid) {
    const Function& f = p.functions[fid];
    const PointsToMap& pts = ctx[fid].alias.points_to();
    FunctionEffects& fx = m.functions[fid];
    for (BlockId b : ctx[fid].cfg.rpo) {
      const auto& insts = f.blocks[b].instructions;
      for (std::uint32_t i = 0; i < insts.size(); ++i) {
        const Instruction& inst = insts[i];
        switch (inst.op) {
          case Opcode::Load: fx.loads.offsets.insert(inst.imm); break;
          case Opcode::Store: fx.stores.offsets.insert(inst.imm); break;
          case Opcode::LoadIdx: fx.loads.dynamic = true; break;
          case Opcode::StoreIdx: fx.stores.dynamic = true; break;
          case Opcode::Call:
            if (!p.find_function(inst.symbol)) {
              for (ValueId a : inst.operands) {
                if (pts.address_valued(a)) fx.stores.top = true;
              }
            }
            break;
          case Opcode::ICall:
            if (cg.unresolved_icalls.count(Site{fid, b, i})) {
              fx.loads.top = true;
              fx.stores.top = true;
            }
            break;
          default: break;
        }
      }
    }
  }

  std::vector<std::vector<FunctionId>> callers(p.functions.size());
  for (const auto& e : cg.edges) {
    if (!cg.is_external(e.callee)) callers[e.callee].push_back(e.site.function);
  }
  for (auto& c : callers) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::deque<FunctionId> work;
  std::vector<bool> queued(p.functions.size(), true);
  for (FunctionId f = 0; f < p.functions.size(); ++f) work.push_back(f);
  while (!work.empty()) {
    FunctionId callee = work.front();
    work.pop_front();
    queued[callee] = false;
    for (FunctionId caller : callers[callee]) {
      if (caller == callee) continue;
      bool grew = m.functions[caller].loads.merge(m.functions[callee].loads);
      grew |= m.functions[caller].stores.merge(m.functions[callee].stores);
      if (grew && !queued[caller]) {
        queued[caller] = true;
        work.push_back(caller);
      }
    }
  }
  return m;
}

SideEffectMap compute_side_effects(const Program& p) {
  auto ctx = build_contexts(p);
  ClassHierarchy h = build_class_hierarchy(p);
  CallGraph cg = build_cha_call_graph(p, h, ctx);
  return compute_side_effects(p, cg, ctx);
}

}  // namespace tirsec
