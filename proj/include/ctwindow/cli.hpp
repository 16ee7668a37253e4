#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctwindow::cli {

/// Parse and execute one command line. `args` excludes the program name.
/// Returns the process exit status: 0 iff every output was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ctwindow::cli
