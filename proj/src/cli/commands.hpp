#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synthrf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the synthrf tool. Returns 0 on success, 1 on runtime
/// failure, 2 on usage or configuration errors.
int run(int argc, char** argv);

/// Same, with explicit arguments (program name excluded) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace synthrf::cli
