#pragma once

// Command-line front end: plan, sweep, validate, report. Exposed as an
// in-process function so tests can drive it without spawning binaries.
// Exit codes: 0 success, 1 no usable solution (infeasible or limit),
// 2 usage or input errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace mecgrid {

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mecgrid
