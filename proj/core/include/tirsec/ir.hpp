#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tirsec {

using ValueId = std::uint32_t;
using BlockId = std::uint32_t;
using FunctionId = std::uint32_t;
using ClassId = std::uint32_t;

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
/// Pseudo block id used for definitions and sites that refer to function parameters.
inline constexpr BlockId kParamBlock = kNone - 1;

enum class Opcode : std::uint8_t {
  Phi,
  New,
  Const,
  ConstStr,
  Copy,
  Binop,
  Load,
  Store,
  LoadIdx,
  StoreIdx,
  Call,
  VCall,
  ICall,
  FuncAddr,
  Br,
  Jmp,
  Ret,
};

std::string_view opcode_name(Opcode op);
bool is_terminator(Opcode op);
bool is_call(Opcode op);
bool is_heap_access(Opcode op);

struct SourceLocation {
  std::string file;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

std::string format_location(const SourceLocation& loc);

class ParseError : public std::runtime_error {
public:
  ParseError(SourceLocation loc, const std::string& message);
  const SourceLocation& location() const noexcept { return loc_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  SourceLocation loc_;
  std::string detail_;
};

/// Operand layout by opcode:
///   phi       operands[i] flows in from targets[i]
///   load      {base}, imm = offset        store     {base, value}, imm = offset
///   loadidx   {base, index}               storeidx  {base, index, value}
///   call      {args...}, symbol = callee  vcall     {receiver, args...}, imm = slot
///   icall     {fnptr, args...}            funcaddr  symbol = function
///   new       symbol = class              const     imm / symbol (str)
///   br        {cond}, targets {then, else}  jmp targets {dest}   ret {} or {value}
struct Instruction {
  Opcode op = Opcode::Ret;
  ValueId result = kNone;
  std::vector<ValueId> operands;
  std::vector<BlockId> targets;
  std::int64_t imm = 0;
  std::string symbol;
  /// Control predicates attached by the implicit-flow prepass.
  std::vector<ValueId> pseudo_uses;
  std::uint32_t line = 0;

  bool has_result() const noexcept { return result != kNone; }

  /// Actual arguments in callee-parameter order. The vcall receiver binds the
  /// callee's first parameter.
  std::span<const ValueId> actual_arguments() const;

  ValueId base() const { return operands.at(0); }
  /// Stored value for store/storeidx.
  ValueId stored_value() const { return operands.back(); }
  /// Index operand for loadidx/storeidx.
  ValueId index() const { return operands.at(1); }
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instructions;

  const Instruction& terminator() const { return instructions.back(); }
};

struct DefPoint {
  BlockId block = kNone;
  std::uint32_t index = 0;

  bool is_param() const noexcept { return block == kParamBlock; }
  bool defined() const noexcept { return block != kNone; }
};

struct Function {
  std::string name;
  std::vector<ValueId> params;
  bool is_entry = false;
  bool is_event = false;
  std::vector<BasicBlock> blocks;
  std::vector<std::string> value_names;
  /// First definition of every value; `block == kNone` for values that are
  /// used but never defined.
  std::vector<DefPoint> defs;
  std::uint32_t line = 0;

  std::size_t value_count() const noexcept { return value_names.size(); }
  const Instruction& instruction_at(DefPoint p) const { return blocks[p.block].instructions[p.index]; }
  std::optional<BlockId> find_block(std::string_view label) const;
  std::optional<ValueId> find_value(std::string_view name) const;
  std::size_t instruction_count() const;

  /// Recomputes `defs` from the instruction stream.
  void index_definitions();
};

struct Field {
  std::string name;
  std::int64_t offset = 0;
};

struct ClassDecl {
  std::string name;
  std::string parent;
  std::vector<Field> fields;
  std::map<std::int64_t, std::string> vtable;
  std::uint32_t line = 0;
};

/// A program is an ordered set of class declarations and functions; iteration
/// order is declaration order.
struct Program {
  std::vector<ClassDecl> classes;
  std::vector<Function> functions;

  std::optional<FunctionId> find_function(std::string_view name) const;
  std::optional<ClassId> find_class(std::string_view name) const;
  std::size_t instruction_count() const;

  /// Rebuilds the name lookup tables after `classes`/`functions` changed.
  void reindex();

private:
  std::unordered_map<std::string, FunctionId> function_index_;
  std::unordered_map<std::string, ClassId> class_index_;
};

/// Program point: (function, block, instruction index). Parameter sites use
/// `block == kParamBlock` with `index` = parameter position.
struct Site {
  FunctionId function = kNone;
  BlockId block = kNone;
  std::uint32_t index = 0;

  auto operator<=>(const Site&) const = default;
  bool is_param() const noexcept { return block == kParamBlock; }
};

std::string format_site(const Program& p, const Site& s);

}  // namespace tirsec
