#include <string>
#include <vector>

#include "mchull/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mchull::run_cli(args);
}
