#include <iostream>

#include "affirr/cli.hpp"

int main(int argc, char** argv) {
  return affirr::cli::run(argc, argv, std::cout, std::cerr);
}
