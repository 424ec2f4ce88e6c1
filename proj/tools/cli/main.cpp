// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return vdpost::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
