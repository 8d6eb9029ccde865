#include "tirsec/hssa.hpp"

#include <algorithm>
#include <numeric>

namespace tirsec {

std::string_view hssa_kind_name(HssaKind k) {
  switch (k) {
    case HssaKind::DPhi: return "dphi";
    case HssaKind::UPhi: return "uphi";
    case HssaKind::MergePhi: return "mergephi";
    case HssaKind::CallUPhi: return "call-uphi";
    case HssaKind::CallDPhi: return "call-dphi";
  }
  return "?";
}

std::vector<HssaEdge> HssaForm::incoming(HssaId n) const {
  std::vector<HssaEdge> out;
  for (const auto& e : edges) {
    if (e.to == n) out.push_back(e);
  }
  return out;
}

namespace {

class Bits {
public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
  void or_with(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
  }
  void and_not(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= ~o.w_[k];
  }
  bool operator==(const Bits&) const = default;
  template <class F>
  void each(F&& f) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      std::uint64_t x = w_[k];
      while (x) {
        int b = __builtin_ctzll(x);
        f(k * 64 + static_cast<std::size_t>(b));
        x &= x - 1;
      }
    }
  }

private:
  std::vector<std::uint64_t> w_;
};

class Builder {
public:
  Builder(const Program& p, FunctionId fid, const FunctionContext& ctx, const SideEffectMap& se, const CallGraph& cg)
      : p_(p), f_(p.functions[fid]), fid_(fid), ctx_(ctx), se_(se), cg_(cg) {}

  HssaForm run() {
    collect();
    index_defs();
    reaching_defs();
    place_merges();
    assign_ids();
    connect_uses();
    return std::move(out_);
  }

private:
  EffectSet effects_of(const HssaNode& n) const {
    if (n.uses_effects) return n.effects;
    EffectSet e;
    e.add(n.offset);
    return e;
  }

  bool may_conflict(const HssaNode& a, const HssaNode& b) const {
    if (!effects_of(a).intersects(effects_of(b))) return false;
    if (a.base == kNone || b.base == kNone) return true;
    return ctx_.alias.may_alias(a.base, b.base);
  }

  bool must_same(const HssaNode& a, const HssaNode& b) const {
    if (a.uses_effects || b.uses_effects || a.base == kNone || b.base == kNone) return false;
    return ctx_.alias.must_alias(HeapLocation{a.base, a.offset}, HeapLocation{b.base, b.offset});
  }

  // A store strongly updates earlier definitions of the same location;
  // call definitions never kill.
  bool kills(const HssaNode& later, const HssaNode& earlier) const {
    return later.kind == HssaKind::DPhi && must_same(later, earlier);
  }

  void collect() {
    const Cfg& cfg = ctx_.cfg;
    const PointsToMap& pts = ctx_.alias.points_to();
    proto_at_.assign(f_.blocks.size(), {});
    for (BlockId b = 0; b < f_.blocks.size(); ++b) {
      const auto& insts = f_.blocks[b].instructions;
      proto_at_[b].assign(insts.size(), {});
      if (!cfg.reachable[b]) continue;
      for (std::uint32_t i = 0; i < insts.size(); ++i) {
        const Instruction& inst = insts[i];
        auto add = [&](HssaNode n) {
          n.block = b;
          n.index = i;
          proto_at_[b][i].push_back(static_cast<std::uint32_t>(proto_.size()));
          proto_.push_back(std::move(n));
        };
        switch (inst.op) {
          case Opcode::Store: add({HssaKind::DPhi, 0, 0, inst.base(), HeapOffset::fixed(inst.imm), {}, false, false, {}}); break;
          case Opcode::Load: add({HssaKind::UPhi, 0, 0, inst.base(), HeapOffset::fixed(inst.imm), {}, false, false, {}}); break;
          case Opcode::StoreIdx:
            add({HssaKind::DPhi, 0, 0, inst.base(), HeapOffset::dynamic(inst.index()), {}, false, false, {}});
            break;
          case Opcode::LoadIdx:
            add({HssaKind::UPhi, 0, 0, inst.base(), HeapOffset::dynamic(inst.index()), {}, false, false, {}});
            break;
          case Opcode::Call:
          case Opcode::VCall:
          case Opcode::ICall: {
            FunctionEffects fx = se_.at_call(cg_, Site{fid_, b, i});
            if (!fx.loads.empty()) add({HssaKind::CallUPhi, 0, 0, kNone, {}, fx.loads, true, true, {}});
            if (!fx.stores.empty()) add({HssaKind::CallDPhi, 0, 0, kNone, {}, fx.stores, true, false, {}});
            if (inst.op == Opcode::Call && !p_.find_function(inst.symbol)) {
              std::vector<ValueId> seen;
              for (ValueId a : inst.operands) {
                if (!pts.address_valued(a) || std::find(seen.begin(), seen.end(), a) != seen.end()) continue;
                seen.push_back(a);
                add({HssaKind::CallDPhi, 0, 0, a, HeapOffset::any(), {}, false, false, {}});
              }
            }
            break;
          }
          default: break;
        }
      }
    }
  }

  void index_defs() {
    def_of_proto_.assign(proto_.size(), kNone);
    for (std::uint32_t n = 0; n < proto_.size(); ++n) {
      if (is_heap_def(proto_[n].kind)) {
        def_of_proto_[n] = static_cast<std::uint32_t>(defs_.size());
        defs_.push_back(n);
      }
    }
    const std::size_t d = defs_.size();
    kill_.assign(d, Bits(d));
    for (std::size_t x = 0; x < d; ++x) {
      for (std::size_t y = 0; y < d; ++y) {
        if (x != y && kills(proto_[defs_[x]], proto_[defs_[y]])) kill_[x].set(y);
      }
    }
  }

  // Applies the definitions of block b with instruction index < limit.
  void transfer(BlockId b, std::uint32_t limit, Bits& set) const {
    for (std::uint32_t i = 0; i < limit && i < proto_at_[b].size(); ++i) {
      for (std::uint32_t n : proto_at_[b][i]) {
        std::uint32_t d = def_of_proto_[n];
        if (d == kNone) continue;
        set.and_not(kill_[d]);
        set.set(d);
      }
    }
  }

  void reaching_defs() {
    const Cfg& cfg = ctx_.cfg;
    const std::size_t nd = defs_.size();
    in_.assign(f_.blocks.size(), Bits(nd));
    out_bits_.assign(f_.blocks.size(), Bits(nd));
    bool changed = true;
    while (changed) {
      changed = false;
      for (BlockId b : cfg.rpo) {
        Bits in(nd);
        for (BlockId pr : cfg.live_preds(b)) in.or_with(out_bits_[pr]);
        Bits out = in;
        transfer(b, kNone, out);
        in_[b] = std::move(in);
        if (!(out == out_bits_[b])) {
          out_bits_[b] = std::move(out);
          changed = true;
        }
      }
    }
  }

  void place_merges() {
    const Cfg& cfg = ctx_.cfg;
    merges_.assign(f_.blocks.size(), {});
    for (BlockId b = 0; b < f_.blocks.size(); ++b) {
      if (!cfg.reachable[b]) continue;
      auto preds = cfg.live_preds(b);
      if (preds.size() < 2) continue;
      std::vector<std::uint32_t> reach;
      in_[b].each([&](std::size_t d) { reach.push_back(static_cast<std::uint32_t>(d)); });
      if (reach.size() < 2) continue;
      std::vector<bool> varying(reach.size(), false);
      for (std::size_t k = 0; k < reach.size(); ++k) {
        for (BlockId pr : preds) {
          if (!out_bits_[pr].test(reach[k])) varying[k] = true;
        }
      }
      std::vector<std::size_t> parent(reach.size());
      std::iota(parent.begin(), parent.end(), 0);
      auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (std::size_t x = 0; x < reach.size(); ++x) {
        for (std::size_t y = x + 1; y < reach.size(); ++y) {
          if (may_conflict(proto_[defs_[reach[x]]], proto_[defs_[reach[y]]])) parent[root(y)] = root(x);
        }
      }
      for (std::size_t r = 0; r < reach.size(); ++r) {
        if (root(r) != r) continue;
        std::vector<std::uint32_t> members;
        bool has_varying = false;
        for (std::size_t k = 0; k < reach.size(); ++k) {
          if (root(k) == r) {
            members.push_back(reach[k]);
            has_varying |= varying[k];
          }
        }
        if (members.size() >= 2 && has_varying) merges_[b].push_back(std::move(members));
      }
    }
  }

  void assign_ids() {
    out_.function = fid_;
    final_of_proto_.assign(proto_.size(), kNone);
    merge_ids_.assign(f_.blocks.size(), {});
    out_.at.assign(f_.blocks.size(), {});
    for (BlockId b = 0; b < f_.blocks.size(); ++b) {
      out_.at[b].assign(f_.blocks[b].instructions.size(), {});
      for (const auto& members : merges_[b]) {
        HssaNode m;
        m.kind = HssaKind::MergePhi;
        m.block = b;
        m.index = kNone;
        m.uses_effects = true;
        bool uniform = true;
        for (std::uint32_t d : members) {
          const HssaNode& in = proto_[defs_[d]];
          m.effects.merge(effects_of(in));
          if (in.uses_effects || !(in.offset == proto_[defs_[members[0]]].offset)) uniform = false;
        }
        if (uniform) {
          m.uses_effects = false;
          m.offset = proto_[defs_[members[0]]].offset;
        }
        merge_ids_[b].push_back(static_cast<HssaId>(out_.nodes.size()));
        out_.nodes.push_back(std::move(m));
      }
      for (std::uint32_t i = 0; i < proto_at_[b].size(); ++i) {
        for (std::uint32_t n : proto_at_[b][i]) {
          final_of_proto_[n] = static_cast<HssaId>(out_.nodes.size());
          out_.at[b][i].push_back(final_of_proto_[n]);
          out_.nodes.push_back(proto_[n]);
        }
      }
    }
  }

  bool external_use(const HssaNode& u, BlockId b, std::uint32_t i) const {
    if (u.kind == HssaKind::CallUPhi) return true;
    if (!ctx_.alias.points_to().has_unknown(u.base)) return false;
    auto kills_use = [&](BlockId x, std::uint32_t limit) {
      for (std::uint32_t k = 0; k < limit && k < proto_at_[x].size(); ++k) {
        for (std::uint32_t n : proto_at_[x][k]) {
          if (proto_[n].kind == HssaKind::DPhi && must_same(proto_[n], u)) return true;
        }
      }
      return false;
    };
    if (kills_use(b, i)) return false;
    if (b == 0) return true;
    const Cfg& cfg = ctx_.cfg;
    std::vector<bool> seen(f_.blocks.size(), false);
    std::vector<BlockId> work = cfg.live_preds(b);
    while (!work.empty()) {
      BlockId x = work.back();
      work.pop_back();
      if (seen[x]) continue;
      seen[x] = true;
      if (kills_use(x, kNone)) continue;
      if (x == 0) return true;
      for (BlockId pr : cfg.live_preds(x)) work.push_back(pr);
    }
    return false;
  }

  void connect_uses() {
    const DominatorTree& dom = ctx_.dom;
    std::vector<HssaEdge> edges;
    for (BlockId b = 0; b < merges_.size(); ++b) {
      for (std::size_t k = 0; k < merge_ids_[b].size(); ++k) {
        for (std::uint32_t d : merges_[b][k]) edges.push_back({final_of_proto_[defs_[d]], merge_ids_[b][k], false});
      }
    }
    for (std::uint32_t n = 0; n < proto_.size(); ++n) {
      const HssaNode& u = proto_[n];
      if (!is_heap_use(u.kind)) continue;
      const HssaId uid = final_of_proto_[n];
      Bits reach = in_[u.block];
      transfer(u.block, u.index, reach);
      reach.each([&](std::size_t d) {
        const HssaNode& def = proto_[defs_[d]];
        if (!may_conflict(def, u)) return;
        const HssaId did = final_of_proto_[defs_[d]];
        const bool must = must_same(def, u);
        if (def.block == u.block && def.index < u.index) {
          edges.push_back({did, uid, must});
          return;
        }
        for (NodeId x = u.block; x != kNone; x = dom.idom[x]) {
          for (std::size_t k = 0; k < merges_[x].size(); ++k) {
            const auto& mem = merges_[x][k];
            if (std::find(mem.begin(), mem.end(), d) == mem.end()) continue;
            edges.push_back({merge_ids_[x][k], uid, false});
            if (must) edges.push_back({did, uid, true});
            return;
          }
          if (x == def.block) break;
        }
        edges.push_back({did, uid, must});
      });
    }
    std::sort(edges.begin(), edges.end());
    // A must edge and a may edge between the same pair collapse to must.
    std::vector<HssaEdge> uniq;
    for (const auto& e : edges) {
      if (!uniq.empty() && uniq.back().from == e.from && uniq.back().to == e.to) {
        uniq.back().must |= e.must;
        continue;
      }
      uniq.push_back(e);
    }
    out_.edges = std::move(uniq);
    for (const auto& e : out_.edges) out_.nodes[e.to].inputs.push_back(e.from);
    for (std::uint32_t n = 0; n < proto_.size(); ++n) {
      HssaNode& node = out_.nodes[final_of_proto_[n]];
      if (!is_heap_use(node.kind)) continue;
      node.external = node.inputs.empty() || external_use(proto_[n], proto_[n].block, proto_[n].index);
    }
  }

  const Program& p_;
  const Function& f_;
  FunctionId fid_;
  const FunctionContext& ctx_;
  const SideEffectMap& se_;
  const CallGraph& cg_;

  std::vector<HssaNode> proto_;
  std::vector<std::vector<std::vector<std::uint32_t>>> proto_at_;
  std::vector<std::uint32_t> defs_;
  std::vector<std::uint32_t> def_of_proto_;
  std::vector<Bits> kill_;
  std::vector<Bits> in_;
  std::vector<Bits> out_bits_;
  std::vector<std::vector<std::vector<std::uint32_t>>> merges_;
  std::vector<std::vector<HssaId>> merge_ids_;
  std::vector<HssaId> final_of_proto_;
  HssaForm out_;
};

}  // namespace

HssaForm build_hssa(const Program& p, FunctionId f, const FunctionContext& ctx, const SideEffectMap& se,
                    const CallGraph& cg) {
  return Builder(p, f, ctx, se, cg).run();
}

std::vector<HssaForm> build_all_hssa(const Program& p, const std::vector<FunctionContext>& ctx,
                                     const SideEffectMap& se, const CallGraph& cg) {
  std::vector<HssaForm> out;
  out.reserve(p.functions.size());
  for (FunctionId f = 0; f < p.functions.size(); ++f) out.push_back(build_hssa(p, f, ctx[f], se, cg));
  return out;
}

std::string dump_hssa(const Program& p, const HssaForm& h) {
  const Function& f = p.functions[h.function];
  std::vector<std::vector<HssaEdge>> in(h.nodes.size());
  for (const auto& e : h.edges) in[e.to].push_back(e);
  std::string out;
  for (HssaId id = 0; id < h.nodes.size(); ++id) {
    const HssaNode& n = h.nodes[id];
    out += "H" + std::to_string(id + 1) + " " + std::string(hssa_kind_name(n.kind)) + " " + f.name + ":" +
           f.blocks[n.block].label + ":" + (n.index == kNone ? std::string("head") : std::to_string(n.index)) + " ";
    out += n.base == kNone ? std::string("*") : f.value_names[n.base];
    out += "@";
    if (n.uses_effects) {
      out += n.effects.to_string();
    } else if (n.offset.kind == HeapOffset::Kind::Static) {
      out += std::to_string(n.offset.value);
    } else if (n.offset.kind == HeapOffset::Kind::Dynamic) {
      out += "[" + f.value_names[n.offset.index] + "]";
    } else {
      out += "*";
    }
    out += " <- [";
    bool first = true;
    for (const auto& e : in[id]) {
      if (!first) out += ", ";
      out += "H" + std::to_string(e.from + 1) + (e.must ? "(must)" : "");
      first = false;
    }
    out += "]";
    if (n.external) out += " ext";
    out += "\n";
  }
  return out;
}

}  // namespace tirsec
