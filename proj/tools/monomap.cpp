#include <iostream>

#include "monomap/cli.hpp"

int main(int argc, char** argv) { return monomap::run_cli(argc, argv, std::cout, std::cerr); }
