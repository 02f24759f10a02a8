#pragma once

#include <iosfwd>

namespace gecforge::cli {

/// Exit codes: 0 success, 2 usage, input or configuration error, 3 backend
/// failure (including per-sample backend failures), 1 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBackend = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gecforge::cli
