// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// cdtbound: solve, bench, gen and check subcommands.
//
// Exit codes: 0 success, 2 invalid input (bad flags, unreadable or invalid
// instance, interior assumption violated), 3 numeric failure.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumeric = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for tests: args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdt::cli
