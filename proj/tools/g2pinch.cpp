#include "g2pinch/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return g2pinch::run_cli(argc, argv, std::cout, std::cerr); }
