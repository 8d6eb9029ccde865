#pragma once

#include <string>

#include "tirsec/parser.hpp"
#include "tirsec/rules.hpp"

namespace tirsec::testkit {

std::string fixture_path(const std::string& file);
std::string read_fixture(const std::string& file);
std::string read_file(const std::string& path);

Program load_program(const std::string& tir_file);
RuleSet load_rules(const std::string& rules_file);

}  // namespace tirsec::testkit
