#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cojump::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kConfig = 3,
  kData = 4,
  kInvariant = 5,
  kStrictFailure = 6,
};

int run(int argc, char** argv);
/// Same as run() with explicit streams; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cojump::cli
