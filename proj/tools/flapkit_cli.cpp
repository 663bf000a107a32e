#include <iostream>

#include "flapkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flapkit::cli::run(args, std::cout, std::cerr);
}
