#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vqvi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct Terminal {
    bool color = false;
};

/// Entry point shared by the executable and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal term = {});

}  // namespace vqvi::cli
