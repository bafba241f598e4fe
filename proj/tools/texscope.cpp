#include <iostream>
#include <string>
#include <vector>

#include "texscope/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return texscope::cli::run(args, std::cout, std::cerr);
}
