#include <iostream>

#include "fidkit/cli.hpp"

int main(int argc, char** argv) {
  return fidkit::cli::run_command(argc, argv, std::cout, std::cerr);
}
