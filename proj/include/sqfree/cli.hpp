#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqfree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Exact parse of a nonnegative integer written plainly or in scientific
// notation ("1e10", "2.5e3"). Throws std::invalid_argument otherwise.
unsigned long long parse_count(const std::string& text);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace sqfree::cli
