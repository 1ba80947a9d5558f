#include <iostream>

#include "ckl/cli.hpp"

int main(int argc, char** argv) {
  return ckl::cli::run(argc, argv, std::cout, std::cerr);
}
