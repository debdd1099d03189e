#include <string>
#include <vector>

#include "gbsense/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gbsense::cli::run(args);
}
