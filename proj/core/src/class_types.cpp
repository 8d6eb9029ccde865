#include "tirsec/class_types.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>

namespace tirsec {

bool ClassSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t ClassSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool ClassSet::merge(const ClassSet& other) {
  if (words_.size() < other.words_.size()) words_.resize(other.words_.size(), 0);
  bool grew = false;
  for (std::size_t k = 0; k < other.words_.size(); ++k) {
    std::uint64_t nw = words_[k] | other.words_[k];
    grew |= nw != words_[k];
    words_[k] = nw;
  }
  return grew;
}

std::vector<ClassId> ClassSet::members() const {
  std::vector<ClassId> out;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    std::uint64_t x = words_[k];
    while (x) {
      out.push_back(static_cast<ClassId>(k * 64 + static_cast<std::size_t>(std::countr_zero(x))));
      x &= x - 1;
    }
  }
  return out;
}

std::vector<std::string> TypeMap::names(const ClassHierarchy& h, FunctionId f, ValueId v) const {
  std::vector<std::string> out;
  for (ClassId c : values[f][v].members()) out.push_back(h.name(c));
  return out;
}

namespace {

class Solver {
public:
  Solver(const Program& p, const ClassHierarchy& h, const std::vector<FunctionContext>& ctx,
         const std::vector<HssaForm>& hssa)
      : p_(p), h_(h), ctx_(ctx), hssa_(hssa) {
    const std::size_t n = p.functions.size();
    const std::size_t k = h.size();
    t_.class_count = k;
    t_.values.resize(n);
    t_.heap.resize(n);
    t_.analyzed.assign(n, false);
    for (FunctionId f = 0; f < n; ++f) {
      t_.values[f].assign(p.functions[f].value_count(), ClassSet(k));
      t_.heap[f].assign(hssa[f].nodes.size(), ClassSet(k));
    }
    ret_.assign(n, ClassSet(k));
    dynamic_ = ClassSet(k);
    all_ = ClassSet(k);
    callers_.resize(n);
    queued_.assign(n, false);
    reads_summary_.assign(n, false);
    incoming_.resize(n);
    merges_.resize(n);
    for (FunctionId f = 0; f < n; ++f) {
      incoming_[f].assign(hssa[f].nodes.size(), {});
      for (const auto& e : hssa[f].edges) incoming_[f][e.to].push_back(e.from);
      merges_[f].assign(p.functions[f].blocks.size(), {});
      for (HssaId m = 0; m < hssa[f].nodes.size(); ++m) {
        const HssaNode& node = hssa[f].nodes[m];
        if (node.external || node.kind == HssaKind::CallDPhi) reads_summary_[f] = true;
        if (node.kind == HssaKind::MergePhi) merges_[f][node.block].push_back(m);
      }
    }
  }

  TypeMap run() {
    for (FunctionId r : entry_functions(p_)) reach(r);
    while (!work_.empty()) {
      FunctionId f = work_.front();
      work_.pop_front();
      queued_[f] = false;
      process(f);
    }
    return std::move(t_);
  }

private:
  void enqueue(FunctionId f) {
    if (!queued_[f]) {
      queued_[f] = true;
      work_.push_back(f);
    }
  }

  void reach(FunctionId f) {
    if (t_.analyzed[f]) return;
    t_.analyzed[f] = true;
    enqueue(f);
  }

  ClassSet summary_for(const HssaNode& n) const {
    ClassSet out(h_.size());
    if (n.uses_effects) {
      if (n.effects.top || n.effects.dynamic) return all_;
      for (auto k : n.effects.offsets) {
        auto it = static_.find(k);
        if (it != static_.end()) out.merge(it->second);
      }
      out.merge(dynamic_);
      return out;
    }
    if (n.offset.kind != HeapOffset::Kind::Static) return all_;
    auto it = static_.find(n.offset.value);
    if (it != static_.end()) out.merge(it->second);
    out.merge(dynamic_);
    return out;
  }

  void record_store(const HssaNode& n, const ClassSet& types) {
    if (types.empty()) return;
    bool grew = all_.merge(types);
    if (n.offset.kind == HeapOffset::Kind::Static) {
      auto [it, inserted] = static_.emplace(n.offset.value, ClassSet(h_.size()));
      grew |= it->second.merge(types);
    } else {
      grew |= dynamic_.merge(types);
    }
    if (grew) {
      for (FunctionId g = 0; g < p_.functions.size(); ++g) {
        if (t_.analyzed[g] && reads_summary_[g]) enqueue(g);
      }
    }
  }

  void add_call_edge(FunctionId caller, FunctionId callee, const Instruction& inst) {
    reach(callee);
    if (std::find(callers_[callee].begin(), callers_[callee].end(), caller) == callers_[callee].end())
      callers_[callee].push_back(caller);
    const Function& g = p_.functions[callee];
    auto args = inst.actual_arguments();
    for (std::size_t k = 0; k < args.size() && k < g.params.size(); ++k) {
      if (t_.values[callee][g.params[k]].merge(t_.values[caller][args[k]])) enqueue(callee);
    }
  }

  std::vector<FunctionId> targets(FunctionId fid, const Instruction& inst) {
    std::vector<FunctionId> out;
    switch (inst.op) {
      case Opcode::Call:
        if (auto g = p_.find_function(inst.symbol)) out.push_back(*g);
        break;
      case Opcode::VCall:
        for (ClassId c : t_.values[fid][inst.operands[0]].members()) {
          if (const std::string* fn = h_.lookup(c, inst.imm)) out.push_back(*p_.find_function(*fn));
        }
        break;
      case Opcode::ICall: {
        const PointsToMap& pts = ctx_[fid].alias.points_to();
        ValueId fp = inst.operands[0];
        for (std::uint32_t obj : pts.of(fp)) {
          if (obj != kUnknownObject && pts.objects[obj].kind == Opcode::FuncAddr)
            out.push_back(*p_.find_function(pts.objects[obj].symbol));
        }
        if (pts.has_unknown(fp)) {
          std::size_t arity = inst.operands.size() - 1;
          auto it = arity_cache_.find(arity);
          if (it == arity_cache_.end()) it = arity_cache_.emplace(arity, address_taken_with_arity(p_, arity)).first;
          const auto& more = it->second;
          out.insert(out.end(), more.begin(), more.end());
        }
        break;
      }
      default: break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void process(FunctionId fid) {
    const Function& f = p_.functions[fid];
    const HssaForm& hs = hssa_[fid];
    auto& vals = t_.values[fid];
    auto& heap = t_.heap[fid];
    bool changed = true;
    while (changed) {
      changed = false;
      for (BlockId b : ctx_[fid].cfg.rpo) {
        const auto& insts = f.blocks[b].instructions;
        for (HssaId m : merges_[fid][b]) {
          for (HssaId src : incoming_[fid][m]) changed |= heap[m].merge(heap[src]);
        }
        for (std::uint32_t i = 0; i < insts.size(); ++i) {
          const Instruction& inst = insts[i];
          for (HssaId n : hs.nodes_at(b, i)) {
            const HssaNode& node = hs.nodes[n];
            switch (node.kind) {
              case HssaKind::DPhi:
                if (heap[n].merge(vals[inst.stored_value()])) {
                  changed = true;
                  record_store(node, heap[n]);
                }
                break;
              case HssaKind::UPhi:
                for (HssaId src : incoming_[fid][n]) changed |= heap[n].merge(heap[src]);
                if (node.external) changed |= heap[n].merge(summary_for(node));
                break;
              case HssaKind::CallDPhi:
                changed |= heap[n].merge(node.base == kNone ? summary_for(node) : all_);
                break;
              default: break;
            }
          }
          if (!inst.has_result()) {
            if (is_call(inst.op)) call(fid, inst);
            continue;
          }
          ClassSet& out = vals[inst.result];
          switch (inst.op) {
            case Opcode::New: {
              auto c = p_.find_class(inst.symbol);
              ClassSet s(h_.size());
              s.insert(*c);
              changed |= out.merge(s);
              break;
            }
            case Opcode::Copy: changed |= out.merge(vals[inst.operands[0]]); break;
            case Opcode::Phi:
              for (ValueId v : inst.operands) changed |= out.merge(vals[v]);
              break;
            case Opcode::Load:
            case Opcode::LoadIdx:
              for (HssaId n : hs.nodes_at(b, i)) changed |= out.merge(heap[n]);
              break;
            case Opcode::Call:
            case Opcode::VCall:
            case Opcode::ICall:
              changed |= call(fid, inst);
              break;
            default: break;
          }
        }
        const Instruction& term = insts.back();
        if (term.op == Opcode::Ret && !term.operands.empty() && ret_[fid].merge(vals[term.operands[0]])) {
          for (FunctionId c : callers_[fid]) enqueue(c);
        }
      }
    }
  }

  // Returns true when the call result grew.
  bool call(FunctionId fid, const Instruction& inst) {
    bool grew = false;
    for (FunctionId g : targets(fid, inst)) {
      add_call_edge(fid, g, inst);
      if (inst.has_result()) grew |= t_.values[fid][inst.result].merge(ret_[g]);
    }
    return grew;
  }

  const Program& p_;
  const ClassHierarchy& h_;
  const std::vector<FunctionContext>& ctx_;
  const std::vector<HssaForm>& hssa_;
  TypeMap t_;
  std::vector<ClassSet> ret_;
  std::map<std::int64_t, ClassSet> static_;
  ClassSet dynamic_;
  ClassSet all_;
  std::vector<std::vector<FunctionId>> callers_;
  std::vector<std::vector<std::vector<HssaId>>> incoming_;
  std::vector<std::vector<std::vector<HssaId>>> merges_;
  std::map<std::size_t, std::vector<FunctionId>> arity_cache_;
  std::vector<bool> reads_summary_;
  std::deque<FunctionId> work_;
  std::vector<bool> queued_;
};

}  // namespace

ClassTypeResult run_class_type_analysis(const Program& p, const ClassHierarchy& h,
                                        const std::vector<FunctionContext>& ctx, const std::vector<HssaForm>& hssa) {
  ClassTypeResult r;
  r.types = Solver(p, h, ctx, hssa).run();
  r.call_graph = build_call_graph(p, h, r.types, ctx);
  return r;
}

std::string dump_types(const Program& p, const ClassHierarchy& h, const TypeMap& t) {
  std::string out;
  for (FunctionId f = 0; f < p.functions.size(); ++f) {
    if (!t.analyzed[f]) continue;
    const Function& fn = p.functions[f];
    for (ValueId v = 0; v < fn.value_count(); ++v) {
      if (t.values[f][v].empty()) continue;
      out += fn.name + " %" + fn.value_names[v] + " : {";
      bool first = true;
      for (const auto& name : t.names(h, f, v)) {
        if (!first) out += ", ";
        out += name;
        first = false;
      }
      out += "}\n";
    }
  }
  return out;
}

}  // namespace tirsec
