#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seatrack::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kRuntimeError = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Closest known subcommand to `word`, or empty when nothing is close.
std::string suggest_subcommand(const std::string& word);

}  // namespace seatrack::cli
