#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uqseg::cli {

/// Runs the `uqseg` command line. `args` excludes the program name.
/// Returns the process exit code; diagnostics go to `err` as one line.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace uqseg::cli
