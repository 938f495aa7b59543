#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tcred/backend.hpp"

namespace tcred::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;  // crypto rejection; reason on stderr
inline constexpr int kUsage = 2;     // bad flags, config or inputs
inline constexpr int kBindFailed = 3;

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// decimal | 0x<hex> | str:<text> | random
Scalar parse_attribute(std::string_view text, Rng& rng = system_rng());

}  // namespace tcred::cli
