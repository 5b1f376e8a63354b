#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pixht::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (args[0] is the program name). Module errors
// print one "code=<token> msg=<text>" line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pixht::cli
