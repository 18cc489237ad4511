#include <iostream>

#include "traintrack/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tt::cli::run(args, std::cout, std::cerr);
}
