#include <iostream>
#include <string>
#include <vector>

#include "kellygame/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return kelly::cli::run(args, std::cout, std::cerr);
}
