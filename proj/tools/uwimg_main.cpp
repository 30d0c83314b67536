#include <iostream>
#include <string>
#include <vector>

#include "uwimg/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return uwimg::cli::run(args, std::cout, std::cerr);
}
