#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankcal::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_data = 2,
  exit_verification = 3,
};

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankcal::cli
