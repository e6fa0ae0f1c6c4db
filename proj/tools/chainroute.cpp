#include <iostream>

#include "chainroute/commands.hpp"

int main(int argc, char** argv) { return chainroute::run_cli(argc, argv, std::cout, std::cerr); }
