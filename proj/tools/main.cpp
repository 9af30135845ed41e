#include <iostream>

#include "archipelago/cli.hpp"

int main(int argc, char** argv) {
  return archipelago::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
