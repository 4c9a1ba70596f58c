#pragma once

#include <iosfwd>

namespace rbacscan {

// Exit codes: 0 clean, 1 findings reported, 2 error.
inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitError = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbacscan
