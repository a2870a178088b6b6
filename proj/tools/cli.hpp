#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lgcf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name: {"train", "--split", "s", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgcf::cli
