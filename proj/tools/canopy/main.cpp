#include <string>
#include <vector>

#include "canopy/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return canopy::cli::run_cli(args);
}
