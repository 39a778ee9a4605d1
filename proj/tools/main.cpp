#include "commands.hpp"

#include <malloc.h>

#include <iostream>

int main(int argc, char** argv) {
  // keep large community matrices in the heap between restarts
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  std::vector<std::string> args(argv + 1, argv + argc);
  return mlcd::cli::run(args, std::cout, std::cerr);
}
