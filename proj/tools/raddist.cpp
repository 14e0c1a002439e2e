#include <iostream>
#include <string>
#include <vector>

#include "raddist/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return raddist::cli_dispatch(args, std::cin, std::cout, std::cerr);
}
