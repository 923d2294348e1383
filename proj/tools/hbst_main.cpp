#include <iostream>

#include "hbst/cli.hpp"

int main(int argc, char** argv) { return hbst::cli::run(argc, argv, std::cout, std::cerr); }
