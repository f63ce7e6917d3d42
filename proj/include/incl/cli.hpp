#pragma once

// incl-verify entry point, callable in-process so tests can check output
// and exit codes without spawning a shell.

#include <iosfwd>

namespace incl {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

/// Runs one command. The report goes to `out` unless --out names a file;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace incl
