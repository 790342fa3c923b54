#pragma once

#include <iosfwd>

namespace permlab {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitOverflow = 3;
inline constexpr int kExitCap = 4;

/// Runs one `permlab` invocation. Results go to `out` (or to --output),
/// diagnostics to `err`. Reads PERMLAB_WORKERS, which overrides --workers.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace permlab
