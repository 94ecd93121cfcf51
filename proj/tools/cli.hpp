#pragma once

#include <iosfwd>

namespace handrv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Returns 0 on success, 1 when input data or
/// parameters fail validation, 2 on a usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace handrv::cli
