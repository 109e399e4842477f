#pragma once

#include <iosfwd>

namespace tnt::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitVerification = 5;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tnt::cli
