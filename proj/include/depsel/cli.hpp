#pragma once
// Command-line front end.

#include <iosfwd>
#include <string>
#include <vector>

namespace depsel::cli {

enum ExitCode : int { success = 0, infeasible = 1, input_error = 2 };

// argv[0] is the program name. Results go to `out` unless redirected to a
// file by --out; diagnostics go to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace depsel::cli
