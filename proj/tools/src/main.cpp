#include "uzawa_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return uzawa::cli::run(argc, argv, std::cout, std::cerr); }
