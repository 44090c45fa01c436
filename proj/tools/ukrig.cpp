#include <iostream>

#include "ukrig/cli.hpp"

int main(int argc, char** argv) { return ukrig::run_cli(argc, argv, std::cout, std::cerr); }
