#include <iostream>
#include <string>
#include <vector>

#include "toolsel/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return toolsel::cli::execute(args, std::cout, std::cerr);
}
