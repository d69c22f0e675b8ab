#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace voltrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // data, tuning, scenario or I/O error
inline constexpr int kExitUsage = 2;    // unknown subcommand, bad or missing flag

/// Runs one command line (without the program name). Summary lines go to
/// `out`; on failure a single diagnostic line goes to `err`.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace voltrack::cli
