#include <iostream>

#include "survlab/commands.hpp"

int main(int argc, char** argv) { return survlab::run_cli(argc, argv, std::cout, std::cerr); }
