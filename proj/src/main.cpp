#include "tomsim/harness.hpp"

int main(int argc, char** argv) {
  return tomsim::harness::cli_main(argc, argv);
}
