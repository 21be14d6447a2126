#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace fbm {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitUsage = 2, kExitInfeasible = 3, kExitValidationFailed = 4 };

/// Entry point of `fbmsim` (simulate / advise / validate / compare).
/// Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit, continuing from `h`.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace fbm
