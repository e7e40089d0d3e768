#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spaql {

// Parses and executes one CLI invocation. `args` excludes the program name.
// Exit codes: 0 success, 1 runtime failure, 2 invalid flags/config.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spaql
