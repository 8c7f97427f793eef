#include <iostream>

#include "codim2/cli.hpp"

int main(int argc, char** argv) { return codim2::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
