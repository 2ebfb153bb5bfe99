#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace biofuse {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one command line. Returns 0 on success, 1 on a domain error and 2 on
/// a usage error. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biofuse
