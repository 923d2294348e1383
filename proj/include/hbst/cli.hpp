#pragma once

#include <iosfwd>

namespace hbst::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `hbst` tool: gen, match, protocol, completeness,
// tree build|info and bench. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hbst::cli
