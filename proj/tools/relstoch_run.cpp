#include <iostream>

#include "relstoch/cli.hpp"

int main(int argc, char** argv) { return relstoch::cli::run_cli(argc, argv, std::cout, std::cerr); }
