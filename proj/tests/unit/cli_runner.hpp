#pragma once

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rscorrect/tools/cli.hpp"

namespace testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

// Runs one command in process with stdout and stderr captured.
inline CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"rscorrect"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = rscorrect::tools::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace testing
