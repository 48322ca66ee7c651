#pragma once

// Command-line front end. `run` is the whole program minus process setup so the
// tests can drive it in memory.

#include <ostream>
#include <string>
#include <vector>

namespace qsl::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kValidation = 2, kNumeric = 3 };

/// args excludes the program name. Tables go to `out` unless --out is given;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.17g" formatting used for every CSV number.
std::string format_number(double x);

}  // namespace qsl::cli
