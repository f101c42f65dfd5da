#include <doctest.h>

#include "mecgrid/model.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace mecgrid;
using mectest::make_tiny_case;

namespace {

bool mentions(const ValidationReport& r, const std::string& where, const std::string& text) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) {
    return v.where.find(where) != std::string::npos &&
           v.message.find(text) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("tiny fixture validates cleanly") {
  const auto r = validate_case(make_tiny_case());
  INFO(r.to_string());
  CHECK(r.ok());
}

TEST_CASE("duplicate identifiers are rejected per collection") {
  auto c = make_tiny_case();
  c.ac_hubs.push_back(c.ac_hubs[1]);
  c.ac_hubs.back().is_reference = false;
  const auto r = validate_case(c);
  CHECK(!r.ok());
  CHECK(mentions(r, "ac hub ac2", "duplicate"));
}

TEST_CASE("exactly one reference hub") {
  auto c = make_tiny_case();
  c.ac_hubs[1].is_reference = true;
  CHECK(mentions(validate_case(c), "ac network", "exactly one reference hub"));
  c.ac_hubs[0].is_reference = false;
  c.ac_hubs[1].is_reference = false;
  CHECK(mentions(validate_case(c), "ac network", "exactly one reference hub"));
}

TEST_CASE("lines must reference known hubs") {
  auto c = make_tiny_case();
  c.ac_lines[0].to = "nowhere";
  CHECK(mentions(validate_case(c), "ac line", "unknown hub nowhere"));
  c = make_tiny_case();
  c.dc_lines[0].from = "dc9";
  CHECK(mentions(validate_case(c), "dc line", "unknown hub dc9"));
  c = make_tiny_case();
  c.pipes[0].to = "g9";
  CHECK(mentions(validate_case(c), "pipe p1", "unknown gas hub g9"));
}

TEST_CASE("profiles must match the horizon and be nonnegative") {
  auto c = make_tiny_case();
  c.ac_hubs[0].demand_p.pop_back();
  CHECK(mentions(validate_case(c), "ac hub ac1", "expected 4"));
  c = make_tiny_case();
  c.renewables[0].forecast[2] = -1.0;
  CHECK(mentions(validate_case(c), "wind w1", "negative"));
}

TEST_CASE("battery energy window must hold the initial state") {
  auto c = make_tiny_case();
  c.batteries[0].e_initial = 5.0;  // below e_min = 10
  CHECK(mentions(validate_case(c), "battery bat1", "e_min <= e_initial <= e_max"));
  c = make_tiny_case();
  c.batteries[0].eta_dc = 0.0;
  CHECK(mentions(validate_case(c), "battery bat1", "eta_dc"));
}

TEST_CASE("pipe linearization point must be nondegenerate") {
  auto c = make_tiny_case();
  c.pipes[0].pi0_to = c.pipes[0].pi0_from;
  CHECK(mentions(validate_case(c), "pipe p1", "singular"));
}

TEST_CASE("concave fuel curves are rejected") {
  auto c = make_tiny_case();
  c.turbines[0].fuel_curve.c2 = -0.01;
  CHECK(mentions(validate_case(c), "turbine mt1 fuel curve", "convex"));
}

TEST_CASE("decreasing cost curves are rejected") {
  auto c = make_tiny_case();
  c.suppliers[0].cost_curve = {CurveSpec::Kind::quadratic, 0.0, -2.0, 0.001, {}};
  CHECK(mentions(validate_case(c), "supplier gs1 cost curve", "decreasing"));
}

TEST_CASE("curve evaluation covers both representations") {
  CurveSpec q{CurveSpec::Kind::quadratic, 1.0, 2.0, 0.5, {}};
  CHECK(q(0.0) == doctest::Approx(1.0));
  CHECK(q(2.0) == doctest::Approx(1.0 + 4.0 + 2.0));

  CurveSpec pts;
  pts.kind = CurveSpec::Kind::points;
  pts.samples = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 3.0}};
  CHECK(pts(0.5) == doctest::Approx(0.5));
  CHECK(pts(1.5) == doctest::Approx(2.0));

  const CurveSpec scaled = q.with_domain_scale(10.0);
  CHECK(scaled(0.2) == doctest::Approx(q(2.0)));
}

TEST_CASE("admittance rows sum to zero and stay symmetric") {
  const auto c = make_tiny_case();
  const auto y = assemble_admittance(c);
  REQUIRE(y.G.rows() == 2);
  for (int i = 0; i < y.G.rows(); ++i) {
    CHECK(std::abs(y.G.row(i).sum()) < 1e-12);
    CHECK(std::abs(y.B.row(i).sum()) < 1e-12);
  }
  CHECK((y.G - y.G.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((y.B - y.B.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(y.G(0, 1) == doctest::Approx(-2.0));
  CHECK(y.B(0, 1) == doctest::Approx(8.0));
  CHECK(y.G(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("parallel lines accumulate admittance") {
  const LineEntry lines[] = {{0, 1, 1.0, -4.0}, {0, 1, 0.5, -2.0}};
  const auto y = assemble_admittance(lines, 2);
  CHECK(y.G(0, 0) == doctest::Approx(1.5));
  CHECK(y.G(0, 1) == doctest::Approx(-1.5));
  CHECK(y.B(1, 1) == doctest::Approx(-6.0));
}

TEST_CASE("per-unit conversion round-trips") {
  const auto c = make_tiny_case();
  const auto pu = to_per_unit(c);
  CHECK(pu.ac_hubs[0].demand_p[0] == doctest::Approx(0.20));
  CHECK(pu.inverters[0].p_max == doctest::Approx(0.80));
  CHECK(pu.batteries[0].e_max == doctest::Approx(0.80));
  // fuel consumed at a given physical power level is unchanged
  CHECK(pu.turbines[0].fuel_curve(0.5) == doctest::Approx(c.turbines[0].fuel_curve(50.0)));

  const auto back = from_per_unit(pu);
  for (size_t j = 0; j < c.ac_hubs.size(); ++j)
    for (int t = 0; t < c.horizon; ++t)
      CHECK(back.ac_hubs[j].demand_p[t] ==
            doctest::Approx(c.ac_hubs[j].demand_p[t]).epsilon(1e-12));
  CHECK(back.batteries[0].e_initial == doctest::Approx(c.batteries[0].e_initial).epsilon(1e-12));
  CHECK(back.turbines[0].fuel_curve(70.0) ==
        doctest::Approx(c.turbines[0].fuel_curve(70.0)).epsilon(1e-12));

  auto bad = c;
  bad.base.power_kva = 0.0;
  CHECK_THROWS_AS((void)to_per_unit(bad), std::invalid_argument);
}

TEST_CASE("hub index lookups") {
  const auto c = make_tiny_case();
  CHECK(c.ac_hub_index("ac2") == 1);
  CHECK(c.ac_hub_index("dc1") == -1);
  CHECK(c.dc_hub_index("dc2") == 1);
  CHECK(c.gas_hub_index("g1") == 0);
  CHECK(c.reference_hub_index() == 0);
}
