#include <iostream>
#include <string>
#include <vector>

#include "sner/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sner::run_cli(args, std::cout, std::cerr);
}
