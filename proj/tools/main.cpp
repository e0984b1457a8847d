#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ontoq::run_cli(args, {std::cin, std::cout, std::cerr, static_cast<bool>(isatty(0))});
}
