#include <iostream>

#include "robust/cli.hpp"

int main(int argc, char** argv) { return robust::run_cli(argc, argv, std::cout, std::cerr); }
