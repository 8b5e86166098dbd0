#pragma once

#include <iosfwd>

namespace pollcast::cli {

// Exit codes are part of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInsufficientPrior = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pollcast::cli
