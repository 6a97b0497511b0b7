#include <iostream>

#include "sharesim/cli.hpp"

int main(int argc, char** argv) {
  return sharesim::run_cli(argc, argv, std::cout, std::cerr);
}
