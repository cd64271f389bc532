#include <iostream>

#include "xtsi/cli.hpp"

int main(int argc, char** argv) { return xtsi::cli::run(argc, argv, std::cout, std::cerr); }
