#include <string>
#include <vector>

#include "eet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eet::cli::run(args);
}
