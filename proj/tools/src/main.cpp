// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include <iostream>
#include <string>
#include <vector>

#include "progcheck/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return progcheck::cli::run(args, std::cout, std::cerr);
}
