#include <iostream>
#include <string>
#include <vector>

#include "cli.h"

auto main(int argc, char** argv) -> int {
  auto args = std::vector<std::string>(argv + 1, argv + argc);
  return lambda_infer::cli::run(args, std::cout, std::cerr);
}
