#include <iostream>
#include <string>
#include <vector>

#include "mtwlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mtw::dispatch(args, std::cout, std::cerr);
}
