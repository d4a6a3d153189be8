#include <iostream>

#include "moviebot/cli/cli.hpp"

int main(int argc, char** argv) {
  return moviebot::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout,
                            std::cerr);
}
