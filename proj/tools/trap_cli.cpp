#include <iostream>

#include "trap/cli.hpp"

int main(int argc, char** argv) { return trap::cli::run(argc, argv, std::cout, std::cerr); }
