#include <iostream>

#include "bbmap/cli.hpp"

int main(int argc, char** argv) { return bbmap::cli::run(argc, argv, std::cout, std::cerr); }
