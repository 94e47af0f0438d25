#include <iostream>

#include "coopmitl/cli.hpp"

int main(int argc, char** argv) { return coopmitl::cli_main(argc, argv, std::cout, std::cerr); }
