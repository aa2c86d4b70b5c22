#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hartree::cli::main(argc, argv, std::cout, std::cerr); }
