#include <iostream>

#include "tagdl/cli/cli.hpp"

int main(int argc, char** argv) { return tagdl::cli::main(argc, argv, std::cout, std::cerr); }
