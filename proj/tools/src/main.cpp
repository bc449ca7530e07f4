#include <iostream>

#include "conesv_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return conesv::cli::run(args, std::cout, std::cerr);
}
