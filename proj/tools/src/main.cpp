#include <iostream>
#include <string>
#include <vector>

#include "sunada_cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sunada::cli::run(args, std::cout, std::cerr);
}
