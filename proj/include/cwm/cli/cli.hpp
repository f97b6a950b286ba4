#pragma once

#include <string>
#include <vector>

namespace cwm::cli {

/// Entry point shared by the binary and the tests. Takes the argument
/// list without the program name. Returns the process exit code:
/// 0 success, 1 runtime/validation failure, 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace cwm::cli
