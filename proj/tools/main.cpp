#include <vector>

#include "mllab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mllab::cli::run(std::move(args));
}
