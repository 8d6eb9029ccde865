#pragma once

#include <span>
#include <string>
#include <string_view>

#include "tirsec/ir.hpp"

namespace tirsec {

struct SourceText {
  std::string name;
  std::string text;
};

/// Parses one IR translation unit. Throws ParseError on the first syntax
/// error, duplicate definition or undefined reference.
Program parse_program(std::string_view text, std::string_view file_name = {});

/// Parses several units into one namespace, as if they were linked together.
/// Cross-unit references are resolved after all units are read; duplicate
/// class or function names across units are errors.
Program parse_program(std::span<const SourceText> sources);

/// Canonical textual form; reparses to a structurally equal program.
std::string print_program(const Program& p);
std::string print_instruction(const Function& f, const Instruction& inst);

/// Structural equality (names, ordering, operands) ignoring line numbers and
/// pseudo-uses.
bool structurally_equal(const Program& a, const Program& b);

}  // namespace tirsec
