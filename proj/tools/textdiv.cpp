#include <iostream>

#include "textdiv/cli.hpp"

int main(int argc, char** argv) { return textdiv::run_cli(argc, argv, std::cout, std::cerr); }
