#pragma once

#include <iosfwd>

namespace mcquad::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kUsage = 2;
inline constexpr int kData = 3;
inline constexpr int kNumerical = 4;

// Parses and runs one invocation. Machine output goes to `out` unless a
// subcommand writes files; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcquad::cli
