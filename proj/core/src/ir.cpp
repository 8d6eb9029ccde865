#include "tirsec/ir.hpp"

namespace tirsec {

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Phi: return "phi";
    case Opcode::New: return "new";
    case Opcode::Const: return "const";
    case Opcode::ConstStr: return "const str";
    case Opcode::Copy: return "copy";
    case Opcode::Binop: return "binop";
    case Opcode::Load: return "load";
    case Opcode::Store: return "store";
    case Opcode::LoadIdx: return "loadidx";
    case Opcode::StoreIdx: return "storeidx";
    case Opcode::Call: return "call";
    case Opcode::VCall: return "vcall";
    case Opcode::ICall: return "icall";
    case Opcode::FuncAddr: return "funcaddr";
    case Opcode::Br: return "br";
    case Opcode::Jmp: return "jmp";
    case Opcode::Ret: return "ret";
  }
  return "?";
}

bool is_terminator(Opcode op) {
  return op == Opcode::Br || op == Opcode::Jmp || op == Opcode::Ret;
}

bool is_call(Opcode op) {
  return op == Opcode::Call || op == Opcode::VCall || op == Opcode::ICall;
}

bool is_heap_access(Opcode op) {
  return op == Opcode::Load || op == Opcode::Store || op == Opcode::LoadIdx || op == Opcode::StoreIdx;
}

std::string format_location(const SourceLocation& loc) {
  std::string out = loc.file.empty() ? std::string("<input>") : loc.file;
  out += ':' + std::to_string(loc.line) + ':' + std::to_string(loc.column);
  return out;
}

ParseError::ParseError(SourceLocation loc, const std::string& message)
    : std::runtime_error(format_location(loc) + ": error: " + message), loc_(std::move(loc)), detail_(message) {}

std::span<const ValueId> Instruction::actual_arguments() const {
  switch (op) {
    case Opcode::Call:
    case Opcode::VCall:
      return {operands.data(), operands.size()};
    case Opcode::ICall:
      return std::span<const ValueId>(operands).subspan(1);
    default:
      return {};
  }
}

std::optional<BlockId> Function::find_block(std::string_view label) const {
  for (BlockId b = 0; b < blocks.size(); ++b) {
    if (blocks[b].label == label) return b;
  }
  return std::nullopt;
}

std::optional<ValueId> Function::find_value(std::string_view name) const {
  for (ValueId v = 0; v < value_names.size(); ++v) {
    if (value_names[v] == name) return v;
  }
  return std::nullopt;
}

std::size_t Function::instruction_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.instructions.size();
  return n;
}

void Function::index_definitions() {
  defs.assign(value_names.size(), DefPoint{});
  for (std::uint32_t i = 0; i < params.size(); ++i) {
    if (!defs[params[i]].defined()) defs[params[i]] = DefPoint{kParamBlock, i};
  }
  for (BlockId b = 0; b < blocks.size(); ++b) {
    const auto& insts = blocks[b].instructions;
    for (std::uint32_t i = 0; i < insts.size(); ++i) {
      ValueId r = insts[i].result;
      if (r != kNone && !defs[r].defined()) defs[r] = DefPoint{b, i};
    }
  }
}

std::optional<FunctionId> Program::find_function(std::string_view name) const {
  auto it = function_index_.find(std::string(name));
  if (it == function_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClassId> Program::find_class(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Program::instruction_count() const {
  std::size_t n = 0;
  for (const auto& f : functions) n += f.instruction_count();
  return n;
}

void Program::reindex() {
  function_index_.clear();
  class_index_.clear();
  for (FunctionId i = 0; i < functions.size(); ++i) function_index_.emplace(functions[i].name, i);
  for (ClassId i = 0; i < classes.size(); ++i) class_index_.emplace(classes[i].name, i);
}

std::string format_site(const Program& p, const Site& s) {
  if (s.function >= p.functions.size()) return "?";
  const Function& f = p.functions[s.function];
  if (s.is_param()) return f.name + ":param:" + std::to_string(s.index);
  std::string label = s.block < f.blocks.size() ? f.blocks[s.block].label : std::string("?");
  return f.name + ':' + label + ':' + std::to_string(s.index);
}

}  // namespace tirsec
