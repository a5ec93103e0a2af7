#pragma once

#include <string>
#include <vector>

namespace coop {

// Entry point behind the command line binary; args excludes argv[0].
// Returns 0 on success, 2 on input/configuration errors, 3 on numeric
// failures.
int run_command(const std::vector<std::string>& args);

}  // namespace coop
