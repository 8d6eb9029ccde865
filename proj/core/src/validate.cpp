#include "tirsec/validate.hpp"

#include <algorithm>
#include <map>

#include "tirsec/cfg.hpp"

namespace tirsec {

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = d.severity == Severity::Error ? "error" : "warning";
  if (!d.scope.empty()) out += " [" + d.scope + "]";
  if (d.line) out += " line " + std::to_string(d.line);
  return out + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

void check_function(const Function& f, std::vector<Diagnostic>& out) {
  auto error = [&](std::uint32_t line, std::string msg) {
    out.push_back(Diagnostic{Severity::Error, f.name, std::move(msg), line});
  };
  auto name = [&](ValueId v) { return "%" + f.value_names[v]; };

  std::vector<std::uint32_t> def_count(f.value_count(), 0);
  for (ValueId p : f.params) ++def_count[p];
  for (const auto& b : f.blocks) {
    for (const auto& inst : b.instructions) {
      if (inst.has_result()) ++def_count[inst.result];
    }
  }
  for (ValueId v = 0; v < f.value_count(); ++v) {
    if (def_count[v] > 1) error(0, name(v) + " is defined " + std::to_string(def_count[v]) + " times");
  }

  Cfg cfg = build_cfg(f);
  DominatorTree dom = compute_dominators(cfg);

  for (BlockId b = 0; b < f.blocks.size(); ++b) {
    const auto& insts = f.blocks[b].instructions;
    bool past_phis = false;
    for (const auto& inst : insts) {
      if (inst.op != Opcode::Phi) {
        past_phis = true;
        continue;
      }
      if (past_phis) error(inst.line, "phi " + name(inst.result) + " is not at the head of block " + f.blocks[b].label);
      std::vector<NodeId> preds = cfg.preds[b];
      std::vector<BlockId> incoming = inst.targets;
      std::sort(preds.begin(), preds.end());
      std::sort(incoming.begin(), incoming.end());
      if (incoming.size() != preds.size()) {
        error(inst.line, "phi " + name(inst.result) + " has " + std::to_string(incoming.size()) +
                             " incoming values but block " + f.blocks[b].label + " has " +
                             std::to_string(preds.size()) + " predecessors");
      } else if (!std::equal(incoming.begin(), incoming.end(), preds.begin())) {
        error(inst.line, "phi " + name(inst.result) + " incoming labels do not match the predecessors of " +
                             f.blocks[b].label);
      }
    }
  }

  // A use is well-formed when its definition dominates it. Dead blocks are
  // reported separately and skipped here.
  auto available_at_end = [&](ValueId v, BlockId blk) {
    const DefPoint& d = f.defs[v];
    if (!d.defined()) return false;
    if (d.is_param()) return true;
    return d.block == blk || dom.dominates(d.block, blk);
  };
  for (BlockId b = 0; b < f.blocks.size(); ++b) {
    if (!cfg.reachable[b]) continue;
    const auto& insts = f.blocks[b].instructions;
    for (std::uint32_t i = 0; i < insts.size(); ++i) {
      const Instruction& inst = insts[i];
      if (inst.op == Opcode::Phi) {
        for (std::size_t k = 0; k < inst.operands.size(); ++k) {
          BlockId from = inst.targets[k];
          if (from >= f.blocks.size() || !cfg.reachable[from]) continue;
          if (!available_at_end(inst.operands[k], from))
            error(inst.line, "use before def of " + name(inst.operands[k]) + " in phi " + name(inst.result));
        }
        continue;
      }
      for (ValueId v : inst.operands) {
        const DefPoint& d = f.defs[v];
        bool ok = d.defined() &&
                  (d.is_param() || (d.block == b && d.index < i) || (d.block != b && dom.dominates(d.block, b)));
        if (!ok) error(inst.line, "use before def of " + name(v));
      }
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_ssa(const Program& p) {
  std::vector<Diagnostic> out;
  for (const auto& f : p.functions) check_function(f, out);
  return out;
}

std::vector<Diagnostic> validate_program(const Program& p) {
  std::vector<Diagnostic> out = validate_ssa(p);
  bool any_entry = false;
  for (const auto& f : p.functions) {
    any_entry = any_entry || f.is_entry || f.is_event;
    Cfg cfg = build_cfg(f);
    for (BlockId b : cfg.dead_blocks()) {
      out.push_back(Diagnostic{Severity::Warning, f.name, "block " + f.blocks[b].label + " is unreachable", 0});
    }
    for (const auto& blk : f.blocks) {
      for (const auto& inst : blk.instructions) {
        if (inst.op != Opcode::Call) continue;
        auto callee = p.find_function(inst.symbol);
        if (callee && p.functions[*callee].params.size() != inst.operands.size()) {
          out.push_back(Diagnostic{Severity::Warning, f.name,
                                   "call to @" + inst.symbol + " passes " + std::to_string(inst.operands.size()) +
                                       " arguments, callee takes " +
                                       std::to_string(p.functions[*callee].params.size()),
                                   inst.line});
        }
      }
    }
  }
  if (!any_entry) out.push_back(Diagnostic{Severity::Warning, "", "program has no entry or event functions", 0});
  return out;
}

}  // namespace tirsec
