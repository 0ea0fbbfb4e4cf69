#include <iostream>

#include "randx/cli.hpp"

int main(int argc, char** argv) { return randx::cli::dispatch(argc, argv, std::cout, std::cerr); }
