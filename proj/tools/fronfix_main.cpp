#include <iostream>

#include "fronfix/harness.hpp"

int main(int argc, char** argv) { return fronfix::run_cli(argc, argv, std::cout, std::cerr); }
