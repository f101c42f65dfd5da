#include <doctest.h>

#include "mecgrid/caseio.hpp"
#include "mecgrid/model.hpp"
#include "test_support.hpp"

#include <fstream>
#include <sstream>

using namespace mecgrid;
using mectest::data_path;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("bundled case1 parses with the documented shape") {
  const MicrogridCase c = parse_case_file(data_path("case1.json"));
  CHECK(c.name == "case1");
  CHECK(c.horizon == 24);
  CHECK(c.ac_hubs.size() == 6);
  CHECK(c.dc_hubs.size() == 5);
  CHECK(c.gas_hubs.size() == 6);
  CHECK(c.ac_lines.size() == 7);
  CHECK(c.dc_lines.size() == 5);
  CHECK(c.pipes.size() == 5);
  CHECK(c.inverters.size() == 2);
  CHECK(c.turbines.size() == 2);
  CHECK(c.renewables.size() == 2);
  CHECK(c.batteries.size() == 1);
  CHECK(c.suppliers.size() == 1);
  CHECK(c.ac_hubs[0].is_reference);
  CHECK(c.costs.pwl_segments == 4);
  CHECK(c.base.power_kva == doctest::Approx(100.0));
  CHECK(c.batteries[0].terminal_rule == TerminalRule::at_least_initial);
  CHECK(c.turbines[0].fuel_curve.kind == CurveSpec::Kind::quadratic);
  CHECK(c.renewables[0].kind == RenewableKind::wind);
  CHECK(c.renewables[1].network == Network::dc);
}

TEST_CASE("serialization round-trips to identical bytes") {
  const MicrogridCase c1 = parse_case_file(data_path("case1.json"));
  const std::string once = serialize_case(c1);
  const MicrogridCase c2 = parse_case_text(once);
  const std::string twice = serialize_case(c2);
  CHECK(once == twice);
  CHECK(c2.name == c1.name);
  CHECK(c2.ac_hubs[3].demand_p == c1.ac_hubs[3].demand_p);
  CHECK(c2.pipes[2].pi0_from == c1.pipes[2].pi0_from);
  CHECK(c2.suppliers[0].cost_curve.c2 == c1.suppliers[0].cost_curve.c2);
}

TEST_CASE("every bundled fixture differs from case1 by its one knob") {
  const MicrogridCase c1 = parse_case_file(data_path("case1.json"));
  const MicrogridCase c2 = parse_case_file(data_path("case2.json"));
  const MicrogridCase c3 = parse_case_file(data_path("case3.json"));
  CHECK(c2.inverters[0].p_max == doctest::Approx(80.0));
  CHECK(c1.inverters[0].p_max == doctest::Approx(120.0));
  CHECK(c2.inverters[1].p_max == c1.inverters[1].p_max);
  for (const auto& p : c3.pipes) CHECK(p.f_max == doctest::Approx(20.0));
  for (const auto& p : c1.pipes) CHECK(p.f_max == doctest::Approx(75.0));
  CHECK(c2.ac_hubs[2].demand_p == c1.ac_hubs[2].demand_p);
  CHECK(c3.gas_hubs[4].heat_demand == c1.gas_hubs[4].heat_demand);
}

TEST_CASE("points curves survive the round trip") {
  std::string text = slurp(data_path("case1.json"));
  const std::string pts =
      "{\"kind\": \"points\", \"points\": [[0, 0], [50, 120], [100, 260], [150, 430]]}";
  const auto at = text.find("\"c1\": 2,");
  REQUIRE(at != std::string::npos);
  const auto open = text.rfind('{', at);
  const auto close = text.find('}', at);
  text = text.substr(0, open) + pts + text.substr(close + 1);
  const MicrogridCase c = parse_case_text(text);
  REQUIRE(c.suppliers[0].cost_curve.kind == CurveSpec::Kind::points);
  REQUIRE(c.suppliers[0].cost_curve.samples.size() == 4);
  CHECK(c.suppliers[0].cost_curve(50.0) == doctest::Approx(120.0));
  CHECK(c.suppliers[0].cost_curve(75.0) == doctest::Approx(190.0));
  const MicrogridCase back = parse_case_text(serialize_case(c));
  CHECK(back.suppliers[0].cost_curve.samples == c.suppliers[0].cost_curve.samples);
}

TEST_CASE("short profiles are reported with their field name") {
  std::string text = slurp(data_path("case1.json"));
  // drop one entry from the first forecast profile
  const auto key = text.find("\"forecast_kw\"");
  REQUIRE(key != std::string::npos);
  const auto open = text.find('[', key);
  const auto comma = text.find(',', open);
  text = text.substr(0, open + 1) + text.substr(comma + 1);
  try {
    (void)parse_case_text(text);
    FAIL("expected CaseIoError");
  } catch (const CaseIoError& e) {
    const std::string what = e.what();
    CHECK(what.find("forecast") != std::string::npos);
    CHECK(what.find("24") != std::string::npos);
  }
}

TEST_CASE("unknown fields are rejected by name") {
  std::string text = slurp(data_path("case1.json"));
  text.replace(text.find("\"horizon_hours\""), 15, "\"horizon_weeks\"");
  try {
    (void)parse_case_text(text);
    FAIL("expected CaseIoError");
  } catch (const CaseIoError& e) {
    CHECK(std::string(e.what()).find("horizon_weeks") != std::string::npos);
  }
}

TEST_CASE("malformed json reports a parse error") {
  CHECK_THROWS_AS((void)parse_case_text("{\"schema\": 1,"), CaseIoError);
  try {
    (void)parse_case_text("not json at all");
  } catch (const CaseIoError& e) {
    CHECK(std::string(e.what()).find("parse") != std::string::npos);
  }
}

TEST_CASE("unsupported schema versions are refused") {
  std::string text = slurp(data_path("case1.json"));
  text.replace(text.find("\"schema\": 1"), 11, "\"schema\": 2");
  CHECK_THROWS_AS((void)parse_case_text(text), CaseIoError);
}

TEST_CASE("semantic problems surface as io errors") {
  std::string text = slurp(data_path("case1.json"));
  // both reference flags off -> validation failure routed through CaseIoError
  const auto at = text.find("\"is_reference\": true");
  REQUIRE(at != std::string::npos);
  text.replace(at, 20, "\"is_reference\": false");
  try {
    (void)parse_case_text(text);
    FAIL("expected CaseIoError");
  } catch (const CaseIoError& e) {
    CHECK(std::string(e.what()).find("reference") != std::string::npos);
  }
}

TEST_CASE("missing file raises a readable error") {
  CHECK_THROWS_AS((void)parse_case_file("/nonexistent/nowhere.json"), CaseIoError);
}

TEST_CASE("write then read returns the same instance") {
  const MicrogridCase c = parse_case_file(data_path("case1.json"));
  const std::string tmp = "/tmp/mecgrid_caseio_roundtrip.json";
  write_case_file(c, tmp);
  const MicrogridCase back = parse_case_file(tmp);
  CHECK(serialize_case(back) == serialize_case(c));
}
