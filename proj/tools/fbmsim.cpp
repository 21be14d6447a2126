#include <iostream>

#include "fbm/cli.hpp"

int main(int argc, char** argv) { return fbm::run_cli(argc, argv, std::cout, std::cerr); }
