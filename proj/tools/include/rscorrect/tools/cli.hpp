#pragma once

#include <stdexcept>

namespace rscorrect::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Bad command-line usage detected after parsing (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and runs one command; returns the process exit code. Failures print
/// a single diagnostic line to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace rscorrect::tools
