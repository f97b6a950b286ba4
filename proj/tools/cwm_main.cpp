#include <string>
#include <vector>

#include "cwm/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cwm::cli::run(args);
}
