#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "blindid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env_seed;
  if (const char* value = std::getenv("BLINDID_SEED")) env_seed = value;
  return blindid::cli::run(args, std::cout, std::cerr, env_seed);
}
