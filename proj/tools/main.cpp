#include <iostream>

#include "smca/cli.hpp"

int main(int argc, char** argv) { return smca::run_cli(argc, argv, std::cout, std::cerr); }
