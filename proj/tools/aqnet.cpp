#include <iostream>
#include <string>
#include <vector>

#include "aqnet/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return aqnet::cli::run_cli(args, std::cout, std::cerr);
}
