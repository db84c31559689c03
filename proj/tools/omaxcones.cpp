#include <iostream>

#include "omaxcones/cli.hpp"

int main(int argc, char** argv) { return omaxcones::cli::dispatch(argc, argv, std::cout, std::cerr); }
