#include <iostream>
#include <string>
#include <vector>

#include "momt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return momt::cli::run(args, std::cout, std::cerr);
}
