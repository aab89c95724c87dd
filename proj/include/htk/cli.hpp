#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace htk {

/// Runs the `htk` command line. `args` excludes the program name. Returns
/// the process exit status: 0 success, 1 bad input data, 2 IO or config
/// error, 3 mathematical infeasibility or inconsistent inputs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace htk
