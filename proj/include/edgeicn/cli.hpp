#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edgeicn {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 usage error, 2 scenario or runtime error.
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgeicn
