#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sweep {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 on success, 2 for input or validation errors, 3 for
/// numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sweep
