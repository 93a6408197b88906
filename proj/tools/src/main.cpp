#include <iostream>

#include "optomode_cli/commands.hpp"

int main(int argc, char** argv) {
  return optomode::cli::run_cli(argc, argv, std::cout, std::cerr);
}
