#include <iostream>

#include "gke_cli/commands.hpp"

int main(int argc, char** argv) { return gke::cli::run_cli(argc, argv, std::cout, std::cerr); }
