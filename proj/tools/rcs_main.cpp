#include <vector>

#include "rcs/cli.hpp"

int main(int argc, char** argv) {
  return rcs::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
