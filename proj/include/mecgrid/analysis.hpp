#pragma once

// Post-solve checks and reporting quantities: physical balance residuals
// recomputed from the schedule (independently of the problem rows), the
// gas-flow linearization error against the square-root law, summary
// metrics, and one-parameter sweeps.

#include "mecgrid/branch_bound.hpp"
#include "mecgrid/build_milp.hpp"
#include "mecgrid/model.hpp"

#include <string>
#include <vector>

namespace mecgrid {

// Worst absolute hub-hour residual per balance family, in physical units
// (kW, kvar, Skcf/hr).
struct BalanceResiduals {
  double ac_active = 0.0;
  double ac_reactive = 0.0;
  double dc = 0.0;
  double gas = 0.0;
  std::string worst;  // location of the largest residual, e.g. "dc[dc3,17]"

  double max_abs() const;
};

BalanceResiduals balance_residuals(const MicrogridCase& physical, const DispatchSchedule& s);

// error[pipe][hour] = scheduled (linearized) flow minus the square-root-law
// flow at the solved pressures; exactly zero when pressures sit at the
// linearization point.
std::vector<std::vector<double>> weymouth_error(const MicrogridCase& physical,
                                                const DispatchSchedule& s);

struct SummaryMetrics {
  SolveStatus status = SolveStatus::optimal;
  double objective_cost = 0.0;       // solver objective, $
  double lost_load_kwh = 0.0;        // unserved electrical energy
  double lost_heat_skcf = 0.0;       // unserved heat
  double heat_served_fraction = 1.0;
  double fuel_cost = 0.0;            // supplier cost over the horizon, $
  double degradation_cost = 0.0;     // beta * discharged energy, $
  double total_generation_kwh = 0.0; // turbines + dispatched renewables
  std::vector<double> hourly_lost_load_kw;
  std::vector<double> hourly_heat_served_skcf;
  std::vector<double> hourly_generation_kw;
  std::vector<double> hourly_discharge_kw;

  // fuel + value-of-lost-load/heat + degradation; equals objective_cost on
  // a consistent solve
  double cost_total(const CostParams& k) const;
};

SummaryMetrics compute_metrics(const MicrogridCase& physical, const DispatchSchedule& s);

// Pointers to every numeric field addressed by a path such as
// "inverters[0].p_max", "pipes[*].f_max" or "costs.beta". Throws
// std::invalid_argument for anything unresolvable.
std::vector<double*> resolve_parameter(MicrogridCase& c, const std::string& path);

struct SweepRow {
  double value = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  bool solved = false;      // metrics are meaningful
  std::string error;        // failure note when not solved
  SummaryMetrics metrics;
};

// One full solve per value, rows in the given order. Failures become rows
// with solved=false instead of aborting the sweep.
std::vector<SweepRow> sweep(const MicrogridCase& base_case, const std::string& parameter_path,
                            const std::vector<double>& values, const BnbOptions& opts = {},
                            MilpBackend* backend = nullptr);

}  // namespace mecgrid
