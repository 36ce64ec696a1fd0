#include <iostream>
#include <string>
#include <vector>

#include "maxent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return maxent::cli::run(args, std::cout, std::cerr);
}
