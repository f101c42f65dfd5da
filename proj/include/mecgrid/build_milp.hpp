#pragma once

// Translates a validated MicrogridCase into a MilpProblem. Electrical
// quantities are converted to per-unit internally; gas quantities stay in
// physical units. The objective is assembled in dollars, constants
// included, so the solved objective is directly the operating cost.

#include "mecgrid/gasflow.hpp"
#include "mecgrid/milp.hpp"
#include "mecgrid/model.hpp"
#include "mecgrid/pwl.hpp"

#include <memory>
#include <vector>

namespace mecgrid {

enum class SolveStatus : uint8_t {
  optimal,
  feasible,        // stopped at a limit with an incumbent
  infeasible,
  unbounded,
  limit,           // stopped at a limit without an incumbent
  numerical_failure,
};

const char* to_string(SolveStatus s);

VariableIndex index_variables(const MicrogridCase& c, int horizon);

struct BuiltModel {
  MilpProblem problem;
  VariableIndex index;
  MicrogridCase physical;              // original units
  MicrogridCase per_unit;              // electrical quantities / base
  AdmittanceMatrix ybus;
  std::vector<LinearFlowModel> flow_models;  // aligned with pipes
  std::vector<PwlCurve> fuel_curves;         // aligned with turbines, p.u. domain
  std::vector<PwlCurve> cost_curves;         // aligned with suppliers
};

class ModelBuilder {
 public:
  // The case must already pass validate_case; horizon and ids are trusted.
  explicit ModelBuilder(const MicrogridCase& physical_case);

  void add_ac_constraints();
  void add_dc_constraints();
  void add_gas_constraints();
  void add_objective();

  const VariableIndex& index() const { return model_.index; }
  const MilpProblem& problem() const { return model_.problem; }

  // Runs any remaining stages and releases the assembled model.
  BuiltModel build();

 private:
  int col(EntityKind e, int ordinal, Quantity q, int hour, int segment = -1) const;
  void emit_variables();
  void push(Row& r, int column, double coeff);

  BuiltModel model_;
  bool ac_done_ = false, dc_done_ = false, gas_done_ = false, obj_done_ = false;
};

inline BuiltModel build_problem(const MicrogridCase& c) { return ModelBuilder(c).build(); }

// Solved per-hour values keyed semantically. Values are stored in the
// solver's per-unit space; accessors convert to physical units (kW, kvar,
// kWh, Skcf/hr) using the stored base.
struct DispatchSchedule {
  SolveStatus status = SolveStatus::optimal;
  double objective = 0.0;
  int horizon = 0;
  double base_kva = 1.0;
  VariableIndex index;
  std::vector<double> raw;  // aligned with index, binaries rounded

  bool has(EntityKind e, int ordinal, Quantity q, int hour, int segment = -1) const;
  // Physical-unit value; throws std::out_of_range for unknown keys.
  double value(EntityKind e, int ordinal, Quantity q, int hour, int segment = -1) const;
  double raw_value(const VarKey& k) const;
};

// Factor turning a per-unit solver value into its physical counterpart.
double physical_scale(Quantity q, double base_kva);

// Maps a raw solution vector back onto the variable index. Checks vector
// length, binary integrality (1e-6) and that the claimed objective matches
// the recomputation from raw values; throws std::runtime_error otherwise.
DispatchSchedule extract_solution(const BuiltModel& model, const std::vector<double>& raw_values,
                                  double claimed_objective, SolveStatus status);

}  // namespace mecgrid
