#include <iostream>

#include "featurenull/cli.hpp"

int main(int argc, char** argv) {
  return featurenull::cli::run(argc, argv, std::cout, std::cerr);
}
