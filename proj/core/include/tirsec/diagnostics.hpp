#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tirsec {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string scope;  // function or rule name, may be empty
  std::string message;
  std::uint32_t line = 0;
};

std::string format_diagnostic(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace tirsec
