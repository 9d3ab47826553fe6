// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return cdt::cli::run(argc, argv, std::cout, std::cerr); }
