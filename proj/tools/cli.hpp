#pragma once

#include <string>
#include <vector>

namespace hofbauer::cli {

enum ExitCode : int {
    ok = 0,
    error = 1,
    validation_failed = 2,
    budget_exhausted = 3,
};

/// Runs the command line tool; args[0] is the program name.
int run(const std::vector<std::string>& args);

} // namespace hofbauer::cli
