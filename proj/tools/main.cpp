#include <iostream>

#include "regsamp/cli.hpp"

int main(int argc, char** argv) { return regsamp::cli::run(argc, argv, std::cout, std::cerr); }
