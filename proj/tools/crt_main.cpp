#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return crt::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
