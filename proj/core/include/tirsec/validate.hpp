#pragma once

#include <vector>

#include "tirsec/diagnostics.hpp"
#include "tirsec/ir.hpp"

namespace tirsec {

/// SSA well-formedness: single definition, definitions dominate uses, phi
/// nodes at block heads with one incoming value per predecessor. Returns an
/// empty list iff all of these hold for every function.
std::vector<Diagnostic> validate_ssa(const Program& p);

/// `validate_ssa` plus warnings that do not invalidate the program: dead
/// blocks, programs without entry functions, and direct calls whose argument
/// count disagrees with the callee.
std::vector<Diagnostic> validate_program(const Program& p);

}  // namespace tirsec
