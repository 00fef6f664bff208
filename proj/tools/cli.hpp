#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kplate/io.hpp"

namespace kplate::cli {

enum ExitCode { kOk = 0, kUsage = 1, kCheckFailed = 2, kSolverFailure = 3 };

/// Executes one configured run, writing artifacts under config.out. Messages
/// go to `log`, errors to `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv (flags and an optional --config file) and runs.
int main(int argc, char** argv);

}  // namespace kplate::cli
