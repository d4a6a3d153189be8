#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moviebot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

// Entry point of the moviebot tool. args excludes the program name. Every
// subcommand prints its resolved configuration first.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace moviebot::cli
