#include <iostream>

#include "sjlt/cli.hpp"

int main(int argc, char **argv) { return sjlt::cli::run(argc, argv, std::cout, std::cerr); }
