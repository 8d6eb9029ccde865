#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tirsec::cli {

enum class Mode { AppTaint, ApiPrivilege, Dump };

struct RunConfig {
  Mode mode = Mode::AppTaint;
  std::vector<std::string> inputs;
  std::string rules_path;
  std::optional<std::size_t> cutoff;
  bool tsv = false;
  std::size_t path_bound = 64;
  std::string dump_what;
  bool implicit_flows = true;
};

inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitInputError = 2;

/// Runs one analysis; the report goes to `out`, diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses the command line (argv[0] included) and runs it.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tirsec::cli
