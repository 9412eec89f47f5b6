#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lorentz_ot::cli {

/// Runs the command line given without the program name. Returns 0 on
/// success, 1 when the measures are not causally related, 2 on bad input and
/// 3 on numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lorentz_ot::cli
