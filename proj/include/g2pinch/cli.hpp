#pragma once

#include <iosfwd>

namespace g2pinch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInconsistency = 3;

/// Entry point of the g2pinch tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace g2pinch
