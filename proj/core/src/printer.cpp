#include <sstream>

#include "tirsec/parser.hpp"

namespace tirsec {
namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string print_instruction(const Function& f, const Instruction& inst) {
  auto v = [&](ValueId id) { return "%" + f.value_names[id]; };
  auto label = [&](BlockId b) { return f.blocks[b].label; };
  auto args = [&](std::size_t from) {
    std::string out = "(";
    for (std::size_t i = from; i < inst.operands.size(); ++i) {
      if (i > from) out += ", ";
      out += v(inst.operands[i]);
    }
    return out + ")";
  };

  std::string out;
  if (inst.has_result()) out = v(inst.result) + " = ";
  switch (inst.op) {
    case Opcode::Phi:
      out += "phi ";
      for (std::size_t i = 0; i < inst.operands.size(); ++i) {
        if (i) out += ", ";
        out += "[" + v(inst.operands[i]) + ", " + label(inst.targets[i]) + "]";
      }
      break;
    case Opcode::New: out += "new " + inst.symbol; break;
    case Opcode::Const: out += "const " + std::to_string(inst.imm); break;
    case Opcode::ConstStr: out += "const str " + quote(inst.symbol); break;
    case Opcode::Copy: out += v(inst.operands[0]); break;
    case Opcode::Binop: out += "binop " + v(inst.operands[0]) + ", " + v(inst.operands[1]); break;
    case Opcode::Load: out += "load " + v(inst.operands[0]) + " @ " + std::to_string(inst.imm); break;
    case Opcode::Store:
      out += "store " + v(inst.operands[0]) + " @ " + std::to_string(inst.imm) + ", " + v(inst.operands[1]);
      break;
    case Opcode::LoadIdx: out += "loadidx " + v(inst.operands[0]) + ", " + v(inst.operands[1]); break;
    case Opcode::StoreIdx:
      out += "storeidx " + v(inst.operands[0]) + ", " + v(inst.operands[1]) + ", " + v(inst.operands[2]);
      break;
    case Opcode::Call: out += "call @" + inst.symbol + args(0); break;
    case Opcode::VCall:
      out += "vcall " + v(inst.operands[0]) + " slot " + std::to_string(inst.imm) + " " + args(1);
      break;
    case Opcode::ICall: out += "icall " + v(inst.operands[0]) + args(1); break;
    case Opcode::FuncAddr: out += "funcaddr @" + inst.symbol; break;
    case Opcode::Br:
      out += "br " + v(inst.operands[0]) + ", " + label(inst.targets[0]) + ", " + label(inst.targets[1]);
      break;
    case Opcode::Jmp: out += "jmp " + label(inst.targets[0]); break;
    case Opcode::Ret:
      out += "ret";
      if (!inst.operands.empty()) out += " " + v(inst.operands[0]);
      break;
  }
  return out;
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& c : p.classes) {
    os << "class " << c.name;
    if (!c.parent.empty()) os << " : " << c.parent;
    os << " {\n";
    for (const auto& fld : c.fields) os << "  field " << fld.name << " @ " << fld.offset << "\n";
    if (!c.vtable.empty()) {
      os << "  vtable {\n";
      for (const auto& [slot, fn] : c.vtable) os << "    " << slot << " : " << fn << "\n";
      os << "  }\n";
    }
    os << "}\n\n";
  }
  for (const auto& f : p.functions) {
    os << "func " << f.name << "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << "%" << f.value_names[f.params[i]];
    }
    os << ")";
    if (f.is_entry) os << " entry";
    if (f.is_event) os << " event";
    os << " {\n";
    for (const auto& b : f.blocks) {
      os << b.label << ":\n";
      for (const auto& inst : b.instructions) os << "  " << print_instruction(f, inst) << "\n";
    }
    os << "}\n\n";
  }
  return os.str();
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.classes.size() != b.classes.size() || a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.parent != y.parent || x.vtable != y.vtable || x.fields.size() != y.fields.size())
      return false;
    for (std::size_t k = 0; k < x.fields.size(); ++k) {
      if (x.fields[k].name != y.fields[k].name || x.fields[k].offset != y.fields[k].offset) return false;
    }
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& f = a.functions[i];
    const auto& g = b.functions[i];
    if (f.name != g.name || f.is_entry != g.is_entry || f.is_event != g.is_event ||
        f.params.size() != g.params.size() || f.blocks.size() != g.blocks.size())
      return false;
    auto same_value = [&](ValueId x, ValueId y) {
      if (x == kNone || y == kNone) return x == y;
      return f.value_names[x] == g.value_names[y];
    };
    for (std::size_t k = 0; k < f.params.size(); ++k) {
      if (!same_value(f.params[k], g.params[k])) return false;
    }
    for (std::size_t bi = 0; bi < f.blocks.size(); ++bi) {
      const auto& bx = f.blocks[bi];
      const auto& by = g.blocks[bi];
      if (bx.label != by.label || bx.instructions.size() != by.instructions.size()) return false;
      for (std::size_t k = 0; k < bx.instructions.size(); ++k) {
        const auto& ix = bx.instructions[k];
        const auto& iy = by.instructions[k];
        if (ix.op != iy.op || ix.imm != iy.imm || ix.symbol != iy.symbol || !same_value(ix.result, iy.result) ||
            ix.operands.size() != iy.operands.size() || ix.targets != iy.targets)
          return false;
        for (std::size_t o = 0; o < ix.operands.size(); ++o) {
          if (!same_value(ix.operands[o], iy.operands[o])) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace tirsec
