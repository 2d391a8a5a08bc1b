#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jcave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitParse = 4;
inline constexpr int kExitSession = 5;

// Runs one command line (without the program name). Everything the command prints
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jcave::cli
