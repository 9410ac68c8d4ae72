#pragma once

#include <iosfwd>

namespace regsamp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point shared by the `regsamp` binary and the tests. Tables and JSON
/// go to `out` unless an output path is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace regsamp::cli
