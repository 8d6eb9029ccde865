#include <iostream>

#include "tirsec_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tirsec::cli::main_with_args(args, std::cout, std::cerr);
}
