#pragma once

// Fixed-point linear model of steady-state pipe flow. The nonlinear flow
// relation f = c_p * sign(pi_n - pi_m) * sqrt(|pi_n^2 - pi_m^2|) is
// linearized around the initial pressures (pi0_from, pi0_to) as
//   f = a_n * pi_n - a_m * pi_m
// which reproduces the nonlinear flow exactly at the linearization point.

#include "mecgrid/model.hpp"

#include <string>
#include <vector>

namespace mecgrid {

struct LinearFlowModel {
  std::string pipe_id;
  double a_n = 0.0;  // coefficient on the from-hub pressure
  double a_m = 0.0;  // coefficient on the to-hub pressure

  double evaluate(double pi_n, double pi_m) const { return a_n * pi_n - a_m * pi_m; }
};

// Throws std::domain_error when the initial pressures coincide (the
// denominator vanishes) or are not both positive.
LinearFlowModel gas_flow_coefficients(const GasPipe& pipe);

std::vector<LinearFlowModel> linearize_pipes(const MicrogridCase& c);

// Signed nonlinear flow at the given pressures, for error reporting.
double weymouth_flow(double c_p, double pi_n, double pi_m);

}  // namespace mecgrid
