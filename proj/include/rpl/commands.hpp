#pragma once

#include <string>
#include <vector>

namespace rpl {

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 invariant failure, 2 configuration/validation error, 3 I/O error.
int run_command(const std::vector<std::string>& args);
int run_command(int argc, const char* const* argv);

} // namespace rpl
