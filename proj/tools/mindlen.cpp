#include "mindlen/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mindlen::cli::run(argc, argv, std::cout, std::cerr); }
