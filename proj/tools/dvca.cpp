#include "cli.hpp"

int main(int argc, char** argv) {
  return dvca::cli::run({argv + 1, argv + argc}, {});
}
