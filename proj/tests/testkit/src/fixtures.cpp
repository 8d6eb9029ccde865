#include "tirsec_testkit/fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tirsec::testkit {

std::string fixture_path(const std::string& file) { return std::string(TIRSEC_FIXTURE_DIR) + "/" + file; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string read_fixture(const std::string& file) { return read_file(fixture_path(file)); }

Program load_program(const std::string& tir_file) { return parse_program(read_fixture(tir_file), tir_file); }

RuleSet load_rules(const std::string& rules_file) { return parse_rules(read_fixture(rules_file), rules_file); }

}  // namespace tirsec::testkit
