#pragma once

// JSON case files, schema version 1. Field names carry units (p_max_kw,
// f_max_skcf_hr) so a file never leaves the reader guessing. Parsing is
// strict: unknown fields, wrong lengths and validation failures are all
// errors with enough context to find the offending spot.

#include "mecgrid/model.hpp"

#include <stdexcept>
#include <string>

namespace mecgrid {

struct CaseIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse and validate. `origin` appears in error messages.
MicrogridCase parse_case_text(const std::string& text, const std::string& origin = "<string>");
MicrogridCase parse_case_file(const std::string& path);

std::string serialize_case(const MicrogridCase& c);
void write_case_file(const MicrogridCase& c, const std::string& path);

}  // namespace mecgrid
