#include "tirsec/taint.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <tuple>

namespace tirsec {

TaintState taint_meet(const TaintState& a, const TaintState& b) {
  TaintState out;
  out.value = (a.value == TaintValue::Tainted || b.value == TaintValue::Tainted) ? TaintValue::Tainted
                                                                                   : TaintValue::Untainted;
  std::set_union(a.origins.begin(), a.origins.end(), b.origins.begin(), b.origins.end(),
                 std::back_inserter(out.origins));
  return out;
}

std::string_view hop_kind_name(HopKind k) {
  switch (k) {
    case HopKind::Scalar: return "scalar";
    case HopKind::Heap: return "heap";
    case HopKind::Pseudo: return "pseudo";
    case HopKind::Call: return "call";
    case HopKind::External: return "external";
  }
  return "?";
}

void insert_pseudo_uses(Function& f, const ControlDependence& cd) {
  for (BlockId b = 0; b < f.blocks.size(); ++b) {
    for (auto& inst : f.blocks[b].instructions) {
      inst.pseudo_uses.clear();
      bool side_effect = inst.op == Opcode::Store || inst.op == Opcode::StoreIdx || is_call(inst.op);
      if (inst.has_result() || side_effect) inst.pseudo_uses = cd.predicates[b];
    }
  }
}

void insert_pseudo_uses(Program& p, const std::vector<FunctionContext>& ctx) {
  for (FunctionId f = 0; f < p.functions.size(); ++f) insert_pseudo_uses(p.functions[f], ctx[f].cd);
}

std::string format_taint_node(const Program& p, const TaintNode& n) {
  const Function& f = p.functions[n.function];
  if (!n.heap) return f.name + ":%" + f.value_names[n.id];
  return f.name + ":H" + std::to_string(n.id + 1);
}

namespace {

struct Edge {
  std::uint32_t to;
  HopKind kind;
};

class TaintEngine {
public:
  TaintEngine(const Program& p, const RuleSet& rs, const std::vector<HssaForm>& hssa, const CallGraph& cg,
              const std::vector<FunctionContext>& ctx)
      : p_(p), rs_(rs), hssa_(hssa), cg_(cg), ctx_(ctx) {}

  std::vector<Finding> run() {
    layout();
    build_edges();
    seed();
    propagate();
    return collect();
  }

private:
  bool live(FunctionId f) const { return cg_.reachable[f]; }
  std::uint32_t val(FunctionId f, ValueId v) const { return vbase_[f] + v; }
  std::uint32_t heap(FunctionId f, HssaId h) const { return hbase_[f] + h; }

  TaintNode node_ref(std::uint32_t n) const {
    auto it = std::upper_bound(vbase_.begin(), vbase_.end(), n);
    FunctionId f = static_cast<FunctionId>(it - vbase_.begin() - 1);
    if (n >= hbase_[f]) return {f, true, n - hbase_[f]};
    return {f, false, n - vbase_[f]};
  }

  void layout() {
    std::uint32_t next = 0;
    for (FunctionId f = 0; f < p_.functions.size(); ++f) {
      vbase_.push_back(next);
      next += static_cast<std::uint32_t>(p_.functions[f].value_count());
      hbase_.push_back(next);
      next += static_cast<std::uint32_t>(hssa_[f].nodes.size());
    }
    adj_.assign(next, {});
  }

  void add(std::uint32_t from, std::uint32_t to, HopKind k) { adj_[from].push_back({to, k}); }

  std::vector<std::string> callee_names(const Site& site, const Instruction& inst) const {
    if (inst.op == Opcode::Call) return {inst.symbol};
    std::vector<std::string> out;
    for (const auto& e : cg_.edges_at(site)) out.push_back(cg_.names[e.callee]);
    return out;
  }

  void build_edges() {
    for (FunctionId f = 0; f < p_.functions.size(); ++f) {
      if (!live(f)) continue;
      const Function& fn = p_.functions[f];
      const HssaForm& hs = hssa_[f];
      for (const auto& e : hs.edges) add(heap(f, e.from), heap(f, e.to), HopKind::Heap);
      for (BlockId b : ctx_[f].cfg.rpo) {
        const auto& insts = fn.blocks[b].instructions;
        for (std::uint32_t i = 0; i < insts.size(); ++i) {
          const Instruction& inst = insts[i];
          auto nodes = hs.nodes_at(b, i);
          switch (inst.op) {
            case Opcode::Copy:
            case Opcode::Phi:
            case Opcode::Binop:
              for (ValueId v : inst.operands) add(val(f, v), val(f, inst.result), HopKind::Scalar);
              break;
            case Opcode::Load:
            case Opcode::LoadIdx:
              for (HssaId n : nodes) add(heap(f, n), val(f, inst.result), HopKind::Heap);
              break;
            case Opcode::Store:
            case Opcode::StoreIdx:
              for (HssaId n : nodes) add(val(f, inst.stored_value()), heap(f, n), HopKind::Heap);
              break;
            case Opcode::Call:
            case Opcode::VCall:
            case Opcode::ICall:
              call_edges(f, Site{f, b, i}, inst, nodes);
              break;
            default: break;
          }
          for (ValueId pu : inst.pseudo_uses) {
            if (inst.has_result()) add(val(f, pu), val(f, inst.result), HopKind::Pseudo);
            for (HssaId n : nodes) {
              if (is_heap_def(hs.nodes[n].kind)) add(val(f, pu), heap(f, n), HopKind::Pseudo);
            }
          }
        }
      }
    }
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.to, x.kind) < std::tie(y.to, y.kind);
      });
      a.erase(std::unique(a.begin(), a.end(), [](const Edge& x, const Edge& y) { return x.to == y.to && x.kind == y.kind; }),
              a.end());
    }
  }

  void call_edges(FunctionId f, const Site& site, const Instruction& inst, std::span<const HssaId> nodes) {
    const HssaForm& hs = hssa_[f];
    auto args = inst.actual_arguments();
    if (inst.op == Opcode::Call && !p_.find_function(inst.symbol)) {
      for (ValueId a : args) {
        if (inst.has_result()) add(val(f, a), val(f, inst.result), HopKind::External);
        for (HssaId n : nodes) {
          if (hs.nodes[n].kind == HssaKind::CallDPhi && hs.nodes[n].base != kNone)
            add(val(f, a), heap(f, n), HopKind::External);
        }
      }
      return;
    }
    for (const auto& e : cg_.edges_at(site)) {
      if (cg_.is_external(e.callee)) continue;
      const FunctionId g = e.callee;
      const Function& gf = p_.functions[g];
      for (std::size_t k = 0; k < args.size() && k < gf.params.size(); ++k)
        add(val(f, args[k]), val(g, gf.params[k]), HopKind::Call);
      if (inst.has_result()) {
        for (BlockId b : ctx_[g].cfg.rpo) {
          const Instruction& term = gf.blocks[b].terminator();
          if (term.op == Opcode::Ret && !term.operands.empty())
            add(val(g, term.operands[0]), val(f, inst.result), HopKind::Call);
        }
      }
      const HssaForm& gh = hssa_[g];
      for (HssaId n : nodes) {
        const HssaNode& caller_node = hs.nodes[n];
        if (caller_node.kind == HssaKind::CallUPhi) {
          for (HssaId m = 0; m < gh.nodes.size(); ++m) {
            if (is_heap_use(gh.nodes[m].kind) && gh.nodes[m].external) add(heap(f, n), heap(g, m), HopKind::Call);
          }
        } else if (caller_node.kind == HssaKind::CallDPhi && caller_node.base == kNone) {
          for (HssaId m = 0; m < gh.nodes.size(); ++m) {
            if (is_heap_def(gh.nodes[m].kind)) add(heap(g, m), heap(f, n), HopKind::Call);
          }
        }
      }
    }
  }

  struct Origin {
    std::size_t rule;
    Site site;
    std::vector<std::uint32_t> seeds;
  };

  std::uint32_t origin_id(std::size_t rule, const Site& site) {
    auto [it, inserted] = origin_index_.emplace(std::make_pair(rule, site), static_cast<std::uint32_t>(origins_.size()));
    if (inserted) origins_.push_back(Origin{rule, site, {}});
    return it->second;
  }

  void seed() {
    for (std::size_t r = 0; r < rs_.taint_rules.size(); ++r) {
      const TaintRule& rule = rs_.taint_rules[r];
      const TaintSource& src = rule.source;
      for (FunctionId f = 0; f < p_.functions.size(); ++f) {
        if (!live(f)) continue;
        const Function& fn = p_.functions[f];
        if (src.event) {
          if (fn.is_event && fn.name == src.function && !src.is_return && src.param < fn.params.size()) {
            std::uint32_t o = origin_id(r, Site{f, kParamBlock, src.param});
            origins_[o].seeds.push_back(val(f, fn.params[src.param]));
          }
          continue;
        }
        for (BlockId b : ctx_[f].cfg.rpo) {
          const auto& insts = fn.blocks[b].instructions;
          for (std::uint32_t i = 0; i < insts.size(); ++i) {
            const Instruction& inst = insts[i];
            if (!is_call(inst.op)) continue;
            Site site{f, b, i};
            auto names = callee_names(site, inst);
            if (std::find(names.begin(), names.end(), src.function) == names.end()) continue;
            if (src.is_return) {
              if (!inst.has_result()) continue;
              origins_[origin_id(r, site)].seeds.push_back(val(f, inst.result));
            } else {
              auto args = inst.actual_arguments();
              if (src.param >= args.size()) continue;
              ValueId a = args[src.param];
              std::uint32_t o = origin_id(r, site);
              origins_[o].seeds.push_back(val(f, a));
              for (HssaId n : hssa_[f].nodes_at(b, i)) {
                const HssaNode& hn = hssa_[f].nodes[n];
                if (hn.kind == HssaKind::CallDPhi && hn.base == a) origins_[o].seeds.push_back(heap(f, n));
              }
            }
          }
        }
      }
    }
  }

  void propagate() {
    state_.assign(adj_.size(), {});
    std::deque<std::uint32_t> work;
    std::vector<bool> queued(adj_.size(), false);
    for (std::uint32_t o = 0; o < origins_.size(); ++o) {
      for (std::uint32_t s : origins_[o].seeds) {
        TaintState seed{TaintValue::Tainted, {o}};
        TaintState merged = taint_meet(state_[s], seed);
        if (!(merged == state_[s])) {
          state_[s] = std::move(merged);
          if (!queued[s]) {
            queued[s] = true;
            work.push_back(s);
          }
        }
      }
    }
    while (!work.empty()) {
      std::uint32_t n = work.front();
      work.pop_front();
      queued[n] = false;
      for (const Edge& e : adj_[n]) {
        TaintState merged = taint_meet(state_[e.to], state_[n]);
        if (merged.origins.size() == state_[e.to].origins.size() && merged.value == state_[e.to].value) continue;
        state_[e.to] = std::move(merged);
        if (!queued[e.to]) {
          queued[e.to] = true;
          work.push_back(e.to);
        }
      }
    }
  }

  // Fewest pseudo-use hops first, then fewest hops; ties go to the lower node id.
  std::vector<std::pair<std::uint32_t, HopKind>> shortest_tree(const Origin& o) const {
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
    std::vector<std::pair<std::uint32_t, HopKind>> pred(adj_.size(), {kNone, HopKind::Scalar});
    constexpr std::pair<std::uint32_t, std::uint32_t> inf{kNone, kNone};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> dist(adj_.size(), inf);
    std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
    for (std::uint32_t s : o.seeds) {
      dist[s] = {0, 0};
      pred[s] = {s, HopKind::Scalar};
      pq.push({0, 0, s});
    }
    std::vector<bool> done(adj_.size(), false);
    while (!pq.empty()) {
      auto [ps, hs, n] = pq.top();
      pq.pop();
      if (done[n]) continue;
      done[n] = true;
      for (const Edge& e : adj_[n]) {
        std::pair<std::uint32_t, std::uint32_t> cand{ps + (e.kind == HopKind::Pseudo ? 1u : 0u), hs + 1};
        if (cand < dist[e.to]) {
          dist[e.to] = cand;
          pred[e.to] = {n, e.kind};
          pq.push({cand.first, cand.second, e.to});
        }
      }
    }
    return pred;
  }

  std::vector<Finding> collect() {
    std::map<std::tuple<std::size_t, Site, Site>, std::pair<std::uint32_t, std::uint32_t>> found;
    for (std::size_t r = 0; r < rs_.taint_rules.size(); ++r) {
      const TaintRule& rule = rs_.taint_rules[r];
      for (FunctionId f = 0; f < p_.functions.size(); ++f) {
        if (!live(f)) continue;
        const Function& fn = p_.functions[f];
        for (BlockId b : ctx_[f].cfg.rpo) {
          const auto& insts = fn.blocks[b].instructions;
          for (std::uint32_t i = 0; i < insts.size(); ++i) {
            const Instruction& inst = insts[i];
            if (!is_call(inst.op)) continue;
            Site site{f, b, i};
            auto names = callee_names(site, inst);
            auto args = inst.actual_arguments();
            for (const TaintSink& sk : rule.sinks) {
              if (sk.param >= args.size() || std::find(names.begin(), names.end(), sk.function) == names.end()) continue;
              std::uint32_t n = val(f, args[sk.param]);
              for (std::uint32_t o : state_[n].origins) {
                if (origins_[o].rule != r) continue;
                found.emplace(std::make_tuple(r, origins_[o].site, site), std::make_pair(o, n));
              }
            }
          }
        }
      }
    }
    std::vector<Finding> out;
    std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, HopKind>>> trees;
    for (const auto& [key, val] : found) {
      const auto& [r, src, snk] = key;
      auto [o, sink_node] = val;
      auto it = trees.find(o);
      if (it == trees.end()) it = trees.emplace(o, shortest_tree(origins_[o])).first;
      const auto& pred = it->second;
      Finding fd;
      fd.rule = rs_.taint_rules[r].name;
      fd.rule_index = r;
      fd.severity = rs_.taint_rules[r].severity;
      fd.source = src;
      fd.sink = snk;
      fd.pair = rs_.taint_rules[r].pair;
      for (std::uint32_t n = sink_node; pred[n].first != n; n = pred[n].first)
        fd.witness.push_back(Hop{pred[n].second, node_ref(pred[n].first), node_ref(n)});
      std::reverse(fd.witness.begin(), fd.witness.end());
      out.push_back(std::move(fd));
    }
    return out;
  }

  const Program& p_;
  const RuleSet& rs_;
  const std::vector<HssaForm>& hssa_;
  const CallGraph& cg_;
  const std::vector<FunctionContext>& ctx_;

  std::vector<std::uint32_t> vbase_;
  std::vector<std::uint32_t> hbase_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<Origin> origins_;
  std::map<std::pair<std::size_t, Site>, std::uint32_t> origin_index_;
  std::vector<TaintState> state_;
};

}  // namespace

std::vector<Finding> run_taint_analysis(const Program& p, const RuleSet& rs, const std::vector<HssaForm>& hssa,
                                        const CallGraph& cg, const std::vector<FunctionContext>& ctx) {
  return TaintEngine(p, rs, hssa, cg, ctx).run();
}

}  // namespace tirsec

namespace tirsec {

std::vector<CollusionEntry> join_colluding(const std::vector<Finding>& producer_findings,
                                           const std::vector<Finding>& consumer_findings) {
  std::vector<CollusionEntry> out;
  for (const auto& a : producer_findings) {
    if (!a.pair || a.pair->role != PairRole::Producer) continue;
    for (const auto& b : consumer_findings) {
      if (b.pair && b.pair->role == PairRole::Consumer && b.pair->tag == a.pair->tag)
        out.push_back({a.pair->tag, a, b});
    }
  }
  return out;
}

}  // namespace tirsec
