#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riam::cli {

/// Exit codes: 0 the judgment holds, 1 it fails, 2 malformed input.
enum ExitCode : int { kHolds = 0, kFails = 1, kBadInput = 2 };

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace riam::cli
