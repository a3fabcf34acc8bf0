#include <iostream>

#include "mcquad/cli.hpp"

int main(int argc, char** argv) {
  return mcquad::cli::run(argc, argv, std::cout, std::cerr);
}
