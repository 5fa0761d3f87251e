#include <string>
#include <vector>

#include "pbl/cli.hpp"

int main(int argc, char** argv) {
  return pbl::run_cli(std::vector<std::string>(argv, argv + argc));
}
