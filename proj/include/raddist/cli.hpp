#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace raddist {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs the command-line interface. `args` excludes the program name.
/// Results go to `out`, diagnostics to `err`; nothing is written to `out`
/// when a command fails. Returns 0 on success, 1 on domain errors and 2 on
/// usage errors.
int cli_dispatch(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace raddist
