#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reachlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one subcommand (`args` excludes the program name). Data goes to
/// files under the output directory; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace reachlab
