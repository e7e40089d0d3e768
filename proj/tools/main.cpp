#include <iostream>

#include "spaql/cli.hpp"

int main(int argc, char** argv) { return spaql::run_cli(argc, argv, std::cout, std::cerr); }
