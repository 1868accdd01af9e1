#include <iostream>
#include <string>
#include <vector>

#include "tlincomb_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tlincomb::cli::run(args, std::cout, std::cerr);
}
