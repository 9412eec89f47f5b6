#include <iostream>
#include <string>
#include <vector>

#include "lorentz_ot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lorentz_ot::cli::run(args, std::cout, std::cerr);
}
