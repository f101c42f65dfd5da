#include "mecgrid/milp.hpp"

#include <stdexcept>

namespace mecgrid {

int MilpProblem::add_variable(std::string name, VarKind kind, double lb, double ub) {
  if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0))
    throw std::invalid_argument("binary variable " + name + " must have bounds within [0, 1]");
  variables.push_back({std::move(name), kind, lb, ub});
  objective.push_back(0.0);
  return static_cast<int>(variables.size()) - 1;
}

Row& MilpProblem::add_row(std::string name, RowSense sense, double rhs) {
  rows.push_back({std::move(name), sense, rhs, {}});
  return rows.back();
}

double MilpProblem::row_activity(const Row& r, const std::vector<double>& x) const {
  double a = 0.0;
  for (const auto& [col, v] : r.coeffs) a += v * x[col];
  return a;
}

double MilpProblem::objective_value(const std::vector<double>& x) const {
  double v = objective_offset;
  for (int j = 0; j < num_vars(); ++j) v += objective[j] * x[j];
  return v;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::V: return "V";
    case Quantity::Theta: return "theta";
    case Quantity::Pd: return "P_d";
    case Quantity::Qd: return "Q_d";
    case Quantity::Pg: return "P_g";
    case Quantity::Qg: return "Q_g";
    case Quantity::Pw: return "P_w";
    case Quantity::Qw: return "Q_w";
    case Quantity::Ps: return "P_s";
    case Quantity::Qs: return "Q_s";
    case Quantity::Pc: return "P_c";
    case Quantity::Qc: return "Q_c";
    case Quantity::PL: return "PL";
    case Quantity::QL: return "QL";
    case Quantity::SL: return "SL";
    case Quantity::Pch: return "P_ch";
    case Quantity::Pdc: return "P_dc";
    case Quantity::Ich: return "I_ch";
    case Quantity::Idc: return "I_dc";
    case Quantity::E: return "E";
    case Quantity::Vgs: return "v_gs";
    case Quantity::Pi: return "pi";
    case Quantity::Fp: return "f_p";
    case Quantity::Gd: return "g_d";
    case Quantity::FuelSeg: return "fuel_seg";
    case Quantity::CostSeg: return "cost_seg";
  }
  return "?";
}

}  // namespace mecgrid
