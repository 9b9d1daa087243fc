#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdg::cli {

/// Runs one CLI invocation; args excludes the program name. Returns the
/// process exit code: 0 ok, 1 usage, 2 data, 3 numeric.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace mdg::cli
