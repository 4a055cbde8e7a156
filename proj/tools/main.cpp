#include <string>
#include <vector>

#include "voxsub/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return voxsub::cli::run(args);
}
