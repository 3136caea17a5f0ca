#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcons::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kRuntimeSingularity = 3 };

/// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcons::cli
