// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace progcheck::cli {

/// Exit codes: 0 success, 1 config error, 2 data error, 3 transport error.
enum ExitCode : int { kOk = 0, kConfig = 1, kData = 2, kTransport = 3 };

int exit_code_for(const std::exception& e);

/// Runs one subcommand (index, verify, bench, bootstrap run, trace show).
/// `args` excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace progcheck::cli
