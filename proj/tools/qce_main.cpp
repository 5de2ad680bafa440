#include <iostream>

#include "qce/cli.hpp"

int main(int argc, char** argv) {
  return qce::run_cli(argc, argv, std::cout, std::cerr);
}
