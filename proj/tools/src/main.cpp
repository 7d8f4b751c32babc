#include <iostream>
#include <string>
#include <vector>

#include "kbbm/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return kbbm::cli::run(args, std::cout, std::cerr);
}
