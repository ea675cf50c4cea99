#include <iostream>
#include <string>
#include <vector>

#include "riam/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return riam::cli::run(args, std::cout, std::cerr);
}
