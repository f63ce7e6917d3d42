#include <iostream>

#include "incl/cli.hpp"

int main(int argc, char** argv) { return incl::run_cli(argc, argv, std::cout, std::cerr); }
