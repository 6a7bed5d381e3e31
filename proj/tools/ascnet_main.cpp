#include <string>
#include <vector>

#include "ascnet/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ascnet::cli::run_cli(args);
}
