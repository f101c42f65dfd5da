#pragma once

// Writes solve results as deterministic files: schedule.csv (one row per
// hour per solved quantity), metrics.json, flows.csv and battery.csv.
// All files are UTF-8 with LF endings and land via write-temp-then-rename
// so readers never observe partial content.

#include "mecgrid/analysis.hpp"
#include "mecgrid/build_milp.hpp"
#include "mecgrid/model.hpp"

#include <string>
#include <vector>

namespace mecgrid {

void write_results(const MicrogridCase& physical, const DispatchSchedule& s,
                   const SummaryMetrics& m, const std::string& out_dir);

// sweep.csv: one row per sweep point with the headline metrics.
void write_sweep_results(const std::string& parameter_path, const std::vector<SweepRow>& table,
                         const std::string& out_dir);

// Formats a double the same way every output file does.
std::string format_number(double v);

// Writes content to dir/name atomically. Throws std::runtime_error with
// the path on failure.
void write_file_atomic(const std::string& dir, const std::string& name,
                       const std::string& content);

}  // namespace mecgrid
