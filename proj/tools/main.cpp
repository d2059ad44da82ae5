#include <iostream>

#include "domcx/cli.hpp"

int main(int argc, char** argv) { return domcx::cli::run(argc, argv, std::cout, std::cerr); }
