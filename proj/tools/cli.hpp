#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace filterstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< validation or certification failure
inline constexpr int kExitIoError = 2;  ///< unreadable input or bad arguments

/// Runs one command line (without the program name) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace filterstab::cli
