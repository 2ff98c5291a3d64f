#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace litgrid {

/// Entry point behind the `litgrid` binary. `args` excludes the program
/// name. Returns 0 on success, 1 when error diagnostics are present and 2 on
/// usage or I/O failures.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace litgrid
