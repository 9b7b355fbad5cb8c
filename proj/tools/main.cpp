#include <iostream>

#include "degroot/cli.hpp"

int main(int argc, char** argv) {
  return degroot::cli_main(argc, argv, std::cout, std::cerr);
}
