#include <iostream>

#include "hbrd/cli.hpp"

int main(int argc, char** argv) { return hbrd::cli::run(argc, argv, std::cout, std::cerr); }
