#include <iostream>

#include "lawvar/cli.hpp"

int main(int argc, char** argv) { return lawvar::run_cli(argc, argv, std::cout, std::cerr); }
