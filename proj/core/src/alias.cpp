#include "tirsec/alias.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace tirsec {
namespace {

void merge_into(std::vector<std::uint32_t>& dst, const std::vector<std::uint32_t>& src, bool& changed) {
  if (src.empty()) return;
  std::vector<std::uint32_t> out;
  out.reserve(dst.size() + src.size());
  std::set_union(dst.begin(), dst.end(), src.begin(), src.end(), std::back_inserter(out));
  if (out.size() != dst.size()) {
    dst = std::move(out);
    changed = true;
  }
}

bool intersects(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

}  // namespace

PointsToMap run_pointer_analysis(const Function& f, const Cfg& cfg) {
  PointsToMap m;
  m.sets.assign(f.value_count(), {});
  const std::vector<std::uint32_t> unknown{kUnknownObject};
  for (ValueId p : f.params) m.sets[p] = unknown;

  // Seed allocation sites and opaque producers, then close over copies and phis.
  for (BlockId b : cfg.rpo) {
    const auto& insts = f.blocks[b].instructions;
    for (std::uint32_t i = 0; i < insts.size(); ++i) {
      const Instruction& inst = insts[i];
      switch (inst.op) {
        case Opcode::New:
        case Opcode::FuncAddr:
          m.sets[inst.result] = {static_cast<std::uint32_t>(m.objects.size())};
          m.objects.push_back(AbstractObject{DefPoint{b, i}, inst.op, inst.symbol});
          break;
        case Opcode::Load:
        case Opcode::LoadIdx:
        case Opcode::Call:
        case Opcode::VCall:
        case Opcode::ICall:
          if (inst.has_result()) m.sets[inst.result] = unknown;
          break;
        default: break;
      }
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (BlockId b : cfg.rpo) {
      for (const Instruction& inst : f.blocks[b].instructions) {
        if (inst.op == Opcode::Copy) {
          merge_into(m.sets[inst.result], m.sets[inst.operands[0]], changed);
        } else if (inst.op == Opcode::Phi) {
          for (ValueId v : inst.operands) merge_into(m.sets[inst.result], m.sets[v], changed);
        }
      }
    }
  }
  return m;
}

ValueNumbering value_number(const Function& f, const Cfg& cfg) {
  ValueNumbering vn;
  vn.number.assign(f.value_count(), kNone);
  std::uint32_t next = 0;
  auto fresh = [&] { return next++; };

  using Key = std::tuple<int, std::int64_t, std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, std::uint32_t> table;
  std::map<std::string, std::uint32_t> strings;
  std::map<std::string, std::uint32_t> functions;
  auto lookup = [&](const Key& k) {
    auto [it, inserted] = table.emplace(k, 0);
    if (inserted) it->second = fresh();
    return it->second;
  };

  for (ValueId p : f.params) vn.number[p] = fresh();
  for (BlockId b : cfg.rpo) {
    std::int64_t epoch = 0;
    for (const Instruction& inst : f.blocks[b].instructions) {
      auto num = [&](ValueId v) { return vn.number[v]; };
      auto known = [&](ValueId v) { return vn.number[v] != kNone; };
      std::uint32_t n = kNone;
      switch (inst.op) {
        case Opcode::Copy:
          n = known(inst.operands[0]) ? num(inst.operands[0]) : fresh();
          break;
        case Opcode::Const: n = lookup(Key{0, inst.imm, 0, 0, 0}); break;
        case Opcode::ConstStr: {
          auto [it, ins] = strings.emplace(inst.symbol, 0);
          if (ins) it->second = fresh();
          n = it->second;
          break;
        }
        case Opcode::FuncAddr: {
          auto [it, ins] = functions.emplace(inst.symbol, 0);
          if (ins) it->second = fresh();
          n = it->second;
          break;
        }
        case Opcode::Binop:
          if (known(inst.operands[0]) && known(inst.operands[1]))
            n = lookup(Key{1, num(inst.operands[0]), num(inst.operands[1]), 0, 0});
          else
            n = fresh();
          break;
        case Opcode::Load:
          n = known(inst.operands[0]) ? lookup(Key{2, num(inst.operands[0]), inst.imm, b, epoch}) : fresh();
          break;
        case Opcode::LoadIdx:
          n = known(inst.operands[0]) && known(inst.operands[1])
                  ? lookup(Key{3, num(inst.operands[0]), num(inst.operands[1]), b, epoch})
                  : fresh();
          break;
        case Opcode::Phi: {
          std::uint32_t common = kNone;
          bool same = true;
          for (ValueId v : inst.operands) {
            if (!known(v) || (common != kNone && num(v) != common)) {
              same = false;
              break;
            }
            common = num(v);
          }
          n = same && common != kNone ? common : fresh();
          break;
        }
        case Opcode::Store:
        case Opcode::StoreIdx:
          ++epoch;
          break;
        case Opcode::Call:
        case Opcode::VCall:
        case Opcode::ICall:
          ++epoch;
          if (inst.has_result()) n = fresh();
          break;
        default:
          if (inst.has_result()) n = fresh();
          break;
      }
      if (inst.has_result() && vn.number[inst.result] == kNone) vn.number[inst.result] = n;
    }
  }
  for (auto& n : vn.number) {
    if (n == kNone) n = fresh();
  }
  return vn;
}

AliasOracle::AliasOracle(const Function& f, const Cfg& cfg)
    : pts_(run_pointer_analysis(f, cfg)), vn_(value_number(f, cfg)), in_cycle_(blocks_in_cycles(cfg)) {}

bool AliasOracle::statically_unique(std::uint32_t object) const {
  if (object == kUnknownObject) return false;
  return !in_cycle_[pts_.objects[object].site.block];
}

bool AliasOracle::may_alias(ValueId a, ValueId b) const {
  if (a == b || vn_.number[a] == vn_.number[b]) return true;
  if (pts_.has_unknown(a) || pts_.has_unknown(b)) return true;
  return intersects(pts_.sets[a], pts_.sets[b]);
}

bool AliasOracle::must_alias(ValueId a, ValueId b) const {
  if (a == b || vn_.number[a] == vn_.number[b]) return true;
  const auto& sa = pts_.sets[a];
  const auto& sb = pts_.sets[b];
  return sa.size() == 1 && sa == sb && statically_unique(sa[0]);
}

bool offsets_may_overlap(const HeapOffset& a, const HeapOffset& b) {
  if (a.kind != HeapOffset::Kind::Static || b.kind != HeapOffset::Kind::Static) return true;
  return a.value == b.value;
}

bool AliasOracle::may_alias(const HeapLocation& a, const HeapLocation& b) const {
  if (!offsets_may_overlap(a.offset, b.offset)) return false;
  if (a.base == kNone || b.base == kNone) return true;
  return may_alias(a.base, b.base);
}

bool AliasOracle::must_alias(const HeapLocation& a, const HeapLocation& b) const {
  if (a.base == kNone || b.base == kNone || !must_alias(a.base, b.base)) return false;
  const HeapOffset& x = a.offset;
  const HeapOffset& y = b.offset;
  if (x.kind == HeapOffset::Kind::Static && y.kind == HeapOffset::Kind::Static) return x.value == y.value;
  if (x.kind == HeapOffset::Kind::Dynamic && y.kind == HeapOffset::Kind::Dynamic)
    return vn_.number[x.index] == vn_.number[y.index];
  return false;
}

}  // namespace tirsec
