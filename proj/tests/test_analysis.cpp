#include <doctest.h>

#include "mecgrid/analysis.hpp"
#include "mecgrid/branch_bound.hpp"
#include "mecgrid/build_milp.hpp"
#include "mecgrid/gasflow.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace mecgrid;
using mectest::make_tiny_case;

namespace {

DispatchSchedule solve_case(const MicrogridCase& c) {
  const auto m = build_problem(c);
  const auto sol = solve_milp(m.problem);
  REQUIRE(sol.status == SolveStatus::optimal);
  return extract_solution(m, sol.x, sol.objective, sol.status);
}

}  // namespace

TEST_CASE("optimal solves leave negligible balance residuals") {
  const auto c = make_tiny_case();
  const auto s = solve_case(c);
  const auto r = balance_residuals(c, s);
  INFO("worst at ", r.worst);
  CHECK(r.ac_active <= 1e-6);
  CHECK(r.ac_reactive <= 1e-6);
  CHECK(r.dc <= 1e-6);
  CHECK(r.gas <= 1e-6);
  CHECK(r.max_abs() <= 1e-6);
}

TEST_CASE("a one-kilowatt perturbation shows up as a one-kilowatt residual") {
  const auto c = make_tiny_case();
  auto s = solve_case(c);
  const VarKey pd{EntityKind::dc_hub, 0, Quantity::Pd, -1, 2};
  const int col = s.index.column(pd);
  REQUIRE(col >= 0);
  s.raw[col] += 1.0 / s.base_kva;  // +1 kW in solver units
  const auto r = balance_residuals(c, s);
  CHECK(r.dc == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.worst.find("dc1") != std::string::npos);

  auto s2 = solve_case(c);
  const int qcol = s2.index.column({EntityKind::ac_hub, 1, Quantity::Qd, -1, 1});
  REQUIRE(qcol >= 0);
  s2.raw[qcol] += 1.0 / s2.base_kva;
  CHECK(balance_residuals(c, s2).ac_reactive == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("weymouth error matches a direct recomputation") {
  const auto c = make_tiny_case();
  const auto s = solve_case(c);
  const auto err = weymouth_error(c, s);
  REQUIRE(err.size() == c.pipes.size());
  REQUIRE(err[0].size() == static_cast<size_t>(c.horizon));
  for (int t = 0; t < c.horizon; ++t) {
    const double f = s.value(EntityKind::pipe, 0, Quantity::Fp, t);
    const double pn = s.value(EntityKind::gas_hub, 0, Quantity::Pi, t);
    const double pm = s.value(EntityKind::gas_hub, 1, Quantity::Pi, t);
    CHECK(err[0][t] ==
          doctest::Approx(f - weymouth_flow(c.pipes[0].c_p, pn, pm)).epsilon(1e-9));
  }
}

TEST_CASE("metric identity: objective equals its cost decomposition") {
  const auto c = make_tiny_case();
  const auto s = solve_case(c);
  const auto m = compute_metrics(c, s);
  CHECK(m.status == SolveStatus::optimal);
  CHECK(m.lost_load_kwh == 0.0);
  CHECK(m.lost_heat_skcf == 0.0);
  CHECK(m.heat_served_fraction == 1.0);
  CHECK(m.cost_total(c.costs) ==
        doctest::Approx(m.objective_cost).epsilon(1e-6));

  double discharge = 0.0;
  for (int t = 0; t < c.horizon; ++t)
    discharge += s.value(EntityKind::battery, 0, Quantity::Pdc, t);
  CHECK(m.degradation_cost == doctest::Approx(c.costs.beta * discharge).epsilon(1e-9));
}

TEST_CASE("degradation cost is beta times discharged energy") {
  SummaryMetrics m;
  m.fuel_cost = 100.0;
  m.degradation_cost = 15.0;  // beta 0.5 * 30 kWh
  CostParams k;
  k.beta = 0.5;
  CHECK(m.cost_total(k) == doctest::Approx(115.0));
  m.lost_load_kwh = 2.0;
  CHECK(m.cost_total(k) == doctest::Approx(115.0 + k.voll_e * 2.0));
}

TEST_CASE("parameter paths resolve to live fields") {
  auto c = make_tiny_case();
  auto p = resolve_parameter(c, "costs.voll_e");
  REQUIRE(p.size() == 1);
  *p[0] = 99.0;
  CHECK(c.costs.voll_e == 99.0);

  p = resolve_parameter(c, "inverters[0].p_max");
  REQUIRE(p.size() == 1);
  CHECK(p[0] == &c.inverters[0].p_max);

  p = resolve_parameter(c, "pipes[*].f_max");
  REQUIRE(p.size() == c.pipes.size());
  for (double* f : p) *f = 33.0;
  CHECK(c.pipes[0].f_max == 33.0);

  p = resolve_parameter(c, "batteries[0].e_initial");
  CHECK(p[0] == &c.batteries[0].e_initial);
  p = resolve_parameter(c, "ac_lines[0].sl_max");
  CHECK(p[0] == &c.ac_lines[0].sl_max);
  p = resolve_parameter(c, "turbines[0].p_max");
  CHECK(p[0] == &c.turbines[0].p_max);
  p = resolve_parameter(c, "suppliers[0].v_max");
  CHECK(p[0] == &c.suppliers[0].v_max);
  p = resolve_parameter(c, "gas_hubs[1].pi_max");
  CHECK(p[0] == &c.gas_hubs[1].pi_max);
}

TEST_CASE("bad parameter paths carry the path in the error") {
  auto c = make_tiny_case();
  CHECK_THROWS_WITH_AS((void)resolve_parameter(c, "inverters[7].p_max"),
                       doctest::Contains("inverters[7].p_max"), std::invalid_argument);
  CHECK_THROWS_AS((void)resolve_parameter(c, "inverters[0].frequency"), std::invalid_argument);
  CHECK_THROWS_AS((void)resolve_parameter(c, "nonsense"), std::invalid_argument);
  CHECK_THROWS_AS((void)resolve_parameter(c, "costs.nope"), std::invalid_argument);
  CHECK_THROWS_AS((void)resolve_parameter(c, "inverters[x].p_max"), std::invalid_argument);
}

TEST_CASE("sweeping the current value reproduces the plain solve") {
  const auto c = make_tiny_case();
  const auto s = solve_case(c);
  const auto base = compute_metrics(c, s);

  const auto rows = sweep(c, "inverters[0].p_max", {c.inverters[0].p_max});
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].solved);
  CHECK(rows[0].status == SolveStatus::optimal);
  CHECK(rows[0].metrics.objective_cost == doctest::Approx(base.objective_cost).epsilon(1e-9));
  CHECK(rows[0].metrics.lost_load_kwh == doctest::Approx(base.lost_load_kwh));
  CHECK(rows[0].metrics.fuel_cost == doctest::Approx(base.fuel_cost).epsilon(1e-9));
}

TEST_CASE("shrinking the inverter strands load behind it") {
  const auto c = make_tiny_case();
  const auto rows = sweep(c, "inverters[0].p_max", {80.0, 45.0, 30.0});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    REQUIRE(r.solved);
    CHECK(r.status == SolveStatus::optimal);
  }
  CHECK(rows[0].metrics.lost_load_kwh == 0.0);
  CHECK(rows[1].metrics.lost_load_kwh >= rows[0].metrics.lost_load_kwh);
  CHECK(rows[2].metrics.lost_load_kwh > rows[1].metrics.lost_load_kwh);
  CHECK(rows[2].metrics.lost_load_kwh > 0.0);
  // cost rises monotonically as service degrades
  CHECK(rows[1].metrics.objective_cost >= rows[0].metrics.objective_cost - 1e-9);
  CHECK(rows[2].metrics.objective_cost > rows[1].metrics.objective_cost);
}

TEST_CASE("sweep records infeasible points instead of aborting") {
  const auto c = make_tiny_case();
  // an inverter forced to export more than the AC side can absorb has no
  // feasible dispatch; p_min > p_max is caught by validation instead
  const auto rows = sweep(c, "batteries[0].e_initial", {30.0, 500.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].solved);
  CHECK(!rows[1].solved);
  CHECK(!rows[1].error.empty());

  CHECK_THROWS_AS((void)sweep(c, "no.such.path", {1.0}), std::invalid_argument);
}
