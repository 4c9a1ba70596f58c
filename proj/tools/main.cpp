#include <iostream>

#include "rbacscan/cli.hpp"

int main(int argc, char** argv) { return rbacscan::run_cli(argc, argv, std::cout, std::cerr); }
