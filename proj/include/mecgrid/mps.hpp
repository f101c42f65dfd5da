#pragma once

// Fixed-format exchange file for cross-checking problems with external
// MILP solvers: NAME / ROWS / COLUMNS (with integer markers) / RHS /
// BOUNDS / ENDATA. Row and column names are generated (R0000001,
// C0000001) because model names exceed the 8-character field width; the
// original names are kept as comments.

#include "mecgrid/milp.hpp"

#include <iosfwd>
#include <string>

namespace mecgrid {

void write_mps(const MilpProblem& p, std::ostream& os, const std::string& name = "MECGRID");
// Throws std::runtime_error when the file cannot be written.
void write_mps_file(const MilpProblem& p, const std::string& path,
                    const std::string& name = "MECGRID");

}  // namespace mecgrid
