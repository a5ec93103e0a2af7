#include <string>
#include <vector>

#include "coop/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return coop::run_command(args);
}
