#include "dyadic/lab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dyadic::lab::run_cli(argc, argv, std::cout, std::cerr); }
