#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace concentra::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPredicateFalse = 2;

/// args excludes the program name. Reports go to out unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

/// key=value lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace concentra::cli
