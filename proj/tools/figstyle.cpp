#include <iostream>

#include "figstyle/cli.hpp"

int main(int argc, char** argv) { return figstyle::cli::run(argc, argv, std::cout, std::cerr); }
