#include <iostream>

#include "metrosim/cli.hpp"

int main(int argc, char** argv) {
  return metrosim::run_cli(argc, argv, std::cout, std::cerr);
}
