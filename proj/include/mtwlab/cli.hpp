#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtw {

inline constexpr int kExitPass = 0;
inline constexpr int kExitBoundViolation = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand; args exclude the program name.
[[nodiscard]] int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

[[nodiscard]] std::vector<std::string> subcommand_names();

}  // namespace mtw
