#include <iostream>

#include "isospec/cli.hpp"

int main(int argc, char** argv) { return isospec::cli::dispatch(argc, argv, std::cout, std::cerr); }
